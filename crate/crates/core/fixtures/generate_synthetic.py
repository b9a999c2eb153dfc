"""Regenerates synthetic_450.csv and its manifest.

The manifest counts are computed here, directly from the generated rows,
without going through the Rust loader or indicator code.
"""
import csv
import random
from pathlib import Path

HERE = Path(__file__).resolve().parent

SECTORS = [
    "social_assistance", "reintegration", "charity", "minorities", "health",
    "economic_development", "education", "rescue", "other",
]
COLUMNS = [
    "org_id", "year", "sectors", "cash_revenues", "total_assets", "fixed_assets",
    "current_assets", "inventories", "accounts_receivable", "cash_equivalents",
    "fund_capital", "long_term_debt", "short_term_debt", "accounts_payable", "net_result",
]

rng = random.Random(20110801)


def amount(mu, sigma):
    return round(rng.lognormvariate(mu, sigma), 2)


rows = []
for org in range(1, 226):
    sectors = sorted(rng.sample(SECTORS, rng.choice([1, 1, 2, 2, 3])))
    for year in (2009, 2010):
        ca = amount(10, 1.6)
        fa = amount(10, 2.0)
        inv = 0.0 if rng.random() < 0.7 else round(ca * rng.random() * 0.3, 2)
        ar = 0.0 if rng.random() < 0.5 else round(ca * rng.random() * 0.4, 2)
        cash = round((ca - inv - ar) * rng.random(), 2)
        rows.append({
            "org_id": f"npo-{org:03d}",
            "year": year,
            "sectors": ";".join(sectors),
            "cash_revenues": amount(11, 1.5),
            "total_assets": round(ca + fa, 2),
            "fixed_assets": fa,
            "current_assets": ca,
            "inventories": inv,
            "accounts_receivable": ar,
            "cash_equivalents": cash,
            "fund_capital": amount(10, 2.0),
            "long_term_debt": 0.0 if rng.random() < 0.8 else amount(9, 1.5),
            "short_term_debt": amount(8, 1.8),
            "accounts_payable": amount(8, 1.5),
            "net_result": round(rng.gauss(0, 20000), 2),
        })

# Planted absences, on disjoint row sets:
#   short_term_debt -> current liabilities absent -> all three ratios absent
#   inventories     -> quick ratio, inventory period absent
#   cash_equivalents-> cash ratio absent
#   cash_revenues   -> all three conversion periods absent
order = list(range(len(rows)))
rng.shuffle(order)
plan = {"short_term_debt": 140, "inventories": 3, "cash_equivalents": 2, "cash_revenues": 5}
cursor = 0
for column, n in plan.items():
    for i in order[cursor:cursor + n]:
        rows[i][column] = ""
    cursor += n

with open(HERE / "synthetic_450.csv", "w", newline="") as f:
    w = csv.DictWriter(f, fieldnames=COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow(r)


def present(r, *cols):
    return all(r[c] != "" for c in cols)


def nonzero(r, c):
    return r[c] != "" and float(r[c]) != 0.0


sizes = {
    "receivables_period": sum(present(r, "accounts_receivable") and nonzero(r, "cash_revenues") for r in rows),
    "payables_period": sum(present(r, "accounts_payable") and nonzero(r, "cash_revenues") for r in rows),
    "inventory_period": sum(present(r, "inventories") and nonzero(r, "cash_revenues") for r in rows),
    "current_ratio": sum(present(r, "current_assets", "short_term_debt", "accounts_payable") for r in rows),
    "quick_ratio": sum(present(r, "current_assets", "inventories", "short_term_debt", "accounts_payable") for r in rows),
    "cash_ratio": sum(present(r, "cash_equivalents", "short_term_debt", "accounts_payable") for r in rows),
}
with open(HERE / "synthetic_450.manifest", "w") as f:
    f.write("# rows\nrows,%d\n" % len(rows))
    f.write("# records per sector (a record counts once for every sector it lists)\n")
    for s in sorted(SECTORS):
        f.write("sector,%s,%d\n" % (s, sum(s in r["sectors"].split(";") for r in rows)))
    f.write("# records per year\n")
    for y in (2009, 2010):
        f.write("year,%d,%d\n" % (y, sum(r["year"] == y for r in rows)))
    f.write("# present values per column\n")
    for k, v in sizes.items():
        f.write("column,%s,%d\n" % (k, v))
