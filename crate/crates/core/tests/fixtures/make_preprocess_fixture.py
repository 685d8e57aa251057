"""Writes preprocess_20.tsv: ten clean pairs (ids 0-9) and ten violations.

Violations: 2 duplicates (one only after NFC), 3 untranslated (case,
whitespace, full case folding), 4 length (14 and 201 source chars, 10
target chars, both sides short), 1 foreign-script letter.
"""
import unicodedata

rows = [
    ("The patient should rest.", "Pacjent powinien odpoczywać.", "ECDC"),
    ("Take one tablet daily.", "Przyjmować jedną tabletkę dziennie.", "EMEA"),
    ("Exactly fifteen", "Dokładnie piętnaście", "SUBTITLES"),
    ("x" * 200, "Długie zdanie na granicy limitu.", "EMEA"),
    ("Zażółć gęślą jaźń, said the test.", "Zażółć gęślą jaźń, powiedział test.", "OTHER"),
    ("Straße closed until Monday.", "Ulica zamknięta do poniedziałku.", "SUBTITLES"),
    ("Wash hands before eating.", "Myj ręce przed jedzeniem.", "ECDC"),
    ("Price: 5 € per dose.", "Cena: 5 € za dawkę.", "EMEA"),
    ("Café au lait spots were seen.", "Widoczne były plamy café au lait.", "SUBTITLES"),
    ("THE PATIENT SHOULD REST.", "PACJENT POWINIEN ODPOCZYWAĆ.", "ECDC"),
    ("The patient should rest.", "Pacjent powinien odpoczywać.", "ECDC"),
    (
        unicodedata.normalize("NFD", "Zażółć gęślą jaźń, said the test."),
        unicodedata.normalize("NFD", "Zażółć gęślą jaźń, powiedział test."),
        "OTHER",
    ),
    ("Hand hygiene saves lives.", "HAND  hygiene saves lives. ", "ECDC"),
    ("Straße ist geschlossen.", "STRASSE IST GESCHLOSSEN.", "SUBTITLES"),
    ("Paracetamol 500 mg tablets", "Paracetamol 500 mg tablets", "EMEA"),
    ("Fourteen chars", "Czternaście znaków", "ECDC"),
    ("x" * 201, "Wystarczająco długie zdanie.", "EMEA"),
    ("Long enough source.", "Za krótko.", "OTHER"),
    ("Hi", "Cześć", "SUBTITLES"),
    ("Vitamin α-tocopherol dose.", "Dawka witaminy α-tokoferol.", "EMEA"),
]
assert len(rows) == 20
assert rows[11][0] != rows[4][0]
assert len("Exactly fifteen") == 15 and len("Fourteen chars") == 14 and len("Za krótko.") == 10

with open("preprocess_20.tsv", "w", encoding="utf-8", newline="\n") as f:
    for i, (s, t, o) in enumerate(rows):
        f.write(f"{i}\t{s}\t{t}\t{o}\n")
