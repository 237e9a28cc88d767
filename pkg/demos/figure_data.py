"""Point-cloud data for the cases without a closed-form solution.

Each case is solved at level 5 and sampled on a density-3 grid inside every
element.  The CSV files (x, y, lambda0) can be fed to any contour plotter.
Sharp layers along characteristics appear where the inflow data or the
convection field is discontinuous.

    python3 demos/figure_data.py [outdir]
"""
import sys
from pathlib import Path

from pdwg.cli import RunConfig, export_plot

outdir = Path(sys.argv[1] if len(sys.argv) > 1 else "figure_data")
outdir.mkdir(exist_ok=True)
for case_id in ("fig_disc", "fig_rotation", "fig_swirl", "fig_lshape", "fig_crack"):
    path = outdir / f"{case_id}.csv"
    text = export_plot(RunConfig(case=case_id, k=1, level=5, plot_out=str(path)))
    values = [float(line.rsplit(",", 1)[1]) for line in text.splitlines()[1:]]
    print(f"{case_id:13s} {len(values):6d} samples, lambda0 in [{min(values):+.3f}, {max(values):+.3f}] -> {path}")
