#!/usr/bin/env python3
"""Render the single-rate figure (path + histogram/density) from CSVs.

Usage: python render_figure1.py --input DIR --out FILE --format png|svg
"""
import sys

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent / "src"))

from sgldiff_plots.figures import figure1_entry

if __name__ == "__main__":
    sys.exit(figure1_entry())
