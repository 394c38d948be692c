"""Rerun a published convergence table and save the comparison as CSV.

Usage: ``python convergence_report.py [table] [quick|full]``.  Table 1 takes
seconds; the scenario tables take a minute or more each.
"""
import sys

from periabc.harness import reproduce_table

table = int(sys.argv[1]) if len(sys.argv) > 1 else 1
budget = sys.argv[2] if len(sys.argv) > 2 else "quick"
report = reproduce_table(table, budget)
print(report.summary())
path = f"table{table}_{budget}.csv"
report.write_csv(path)
print("wrote", path)
