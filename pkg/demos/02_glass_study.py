"""The forensic glass study, end to end.

Window fragments (the only class a crime-scene analyst can actually collect)
train three one-class classifiers; containers, tableware and headlamps act as
the unseen "other" class at evaluation time. Everything it writes lands in
demos/output/.  Run from the repository root:
    python demos/02_glass_study.py          (~20 s; the full RP column is the
    slow part of the real grid and is skipped here, see the CLI for it)
"""

import os

import numpy as np

from tocc import (correlation_matrix, fit_pam_tocc_df, fit_tocc_df,
                  load_glass, predict, roc_curve, run_glass_repro)
from tocc.io_utils import write_roc_svg

OUT = os.path.join(os.path.dirname(__file__), "output")
os.makedirs(OUT, exist_ok=True)

glass = load_glass()
is_target = glass.is_target()
target = glass.select_rows(is_target)
print(f"study set: {glass.n} fragments = {int(is_target.sum())} window (target)"
      f" + {int((~is_target).sum())} non-window")

# ---------------------------------------------------------------------------
# The features are strongly entangled on the target class.
# ---------------------------------------------------------------------------
corr = correlation_matrix(target)
names = target.feature_names
print("\nstrongest target-class correlations:")
pairs = [(abs(corr[i, j]), names[i], names[j], corr[i, j])
         for i in range(len(names)) for j in range(i + 1, len(names))]
for _, a, b, r in sorted(pairs, reverse=True)[:5]:
    print(f"  {a:>2} - {b:<2}  r = {r:+.3f}")

# ---------------------------------------------------------------------------
# Fit on the two selected elements and look at a few fragments.
# ---------------------------------------------------------------------------
view = ["Si", "Mg"]
model = fit_tocc_df(target.select_features(view), s=0.9)
scores = predict(model, glass.select_features(view))
curve = roc_curve(scores.typicality(), is_target)
print(f"\ntocc-df on {view}: AUC {curve.auc:.3f}, "
      f"specificity {float((~scores.accept[~is_target]).mean()):.3f} "
      f"at >=0.9 training sensitivity")

pam_model = fit_pam_tocc_df(target.select_features(view), 4, 0.9)
pam_scores = predict(pam_model, glass.select_features(view))
pam_curve = roc_curve(pam_scores.typicality(), is_target)
sizes = np.bincount(pam_model.pam.assignment)
print(f"pam-tocc-df (k=4, cluster sizes {sizes.tolist()}): "
      f"AUC {pam_curve.auc:.3f}, specificity "
      f"{float((~pam_scores.accept[~is_target]).mean()):.3f}")

svg_path = os.path.join(OUT, "glass_roc.svg")
write_roc_svg(svg_path, [("tocc-df / Si+Mg", curve),
                         ("pam-tocc-df / Si+Mg", pam_curve)])
print(f"ROC curves -> {svg_path}")

# ---------------------------------------------------------------------------
# The evaluation grid (PCA + selected-variable columns; add "rp2" to
# frontends for the full, slower table).
# ---------------------------------------------------------------------------
result = run_glass_repro(frontends=("pca2", "kvip2"), seed=7)
print(f"\nvariable selection picked: {', '.join(result.vip_selected)}")
print(f"{'':14s}{'pca2':>12s}{'kvip2':>12s}")
for variant in ("tocc-df", "tocc-db", "pam-tocc-df"):
    row = [result.cell(variant, fe).auc for fe in ("pca2", "kvip2")]
    print(f"{variant:<14s}{row[0]:12.3f}{row[1]:12.3f}")
for note in result.notes:
    print("note:", note)
