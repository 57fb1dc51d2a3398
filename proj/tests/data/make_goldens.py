"""Writes golden prompt files for the sample datasets.

Independent of the C++ code: reads the CSVs with the csv module and applies
the sentence template directly. Rerun only when the samples change.
"""
import csv
import pathlib

HERE = pathlib.Path(__file__).parent

DATASETS = {
    "arrow": ("arrow_sample.csv", "diode", "Part Number",
              ["Manufacturer", "Zener Voltage", "Power Dissipation", "Tolerance",
               "Package", "Mounting", "Configuration"]),
    "gsm_arena": ("gsm_sample.csv", "phone", None,
                  ["Brand", "Model", "Network Technology", "Announced", "Display Size",
                   "Platform OS", "Chipset", "Internal Memory", "Main Camera", "Battery"]),
}

for name, (path, noun, id_col, features) in DATASETS.items():
    out_dir = HERE / "golden" / name
    out_dir.mkdir(parents=True, exist_ok=True)
    with open(HERE / path, newline="", encoding="utf-8") as fh:
        for pos, row in enumerate(csv.DictReader(fh)):
            sentences = [f"The {col} is {row[col].strip()}." for col in features if row[col].strip()]
            serialization = " ".join(sentences)
            prompt = (f"{noun[0].upper()}{noun[1:]} features: {serialization} "
                      f"Question: Is this {noun} available? Yes or no? Answer:")
            row_id = row[id_col].strip() if id_col else str(pos)
            (out_dir / f"{row_id}.txt").write_bytes(prompt.encode("utf-8"))
