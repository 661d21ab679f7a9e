"""Walk through p-rationality for a cyclotomic and some imaginary quadratic fields.

Run with:  python3 demos/01_prationality.py
"""

from muinv.numberfield import CycloField, QuadField, splitting_data
from muinv.prationality import survey_quadratic, test_numerical, test_theoretical

K = CycloField(7)
sd = splitting_data(K, 37)
print(f"37 in Q(zeta_7): e = {sd.e}, residue degree = {sd.fres}, primes = {sd.g}")
rep = test_numerical(K, 37)
print(f"d_p A_m = {rep.dpAm} against r_2 + 1 = {rep.expected}: {rep.verdict}")
for note in rep.notes:
    print("  note:", note)

# For fields containing zeta_p the decision reduces to the primes above p.
for f in (7, 13):
    print(f"Q(zeta_{f}) at p = 2:", test_theoretical(CycloField(f), 2).verdict)

# When p divides the class number, a split prime generating the p-class group
# contributes one extra relation.  Q(sqrt -47) has class number 5.
for d in (-47, -347):
    r = test_numerical(QuadField(d), 5)
    print(f"Q(sqrt {d}), p = 5: d_p A_m = {r.dpAm}, {r.verdict}")

survey = survey_quadratic(5, 500)
print("survey of |D| <= 500 at p = 5:", survey.counts, "proportion", survey.proportion)
