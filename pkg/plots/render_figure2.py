#!/usr/bin/env python3
"""Render the rate-sweep figure (one row per learning rate) from CSVs.

Usage: python render_figure2.py --input DIR --out FILE --format png|svg
"""
import sys

sys.path.insert(0, str(__import__("pathlib").Path(__file__).parent / "src"))

from sgldiff_plots.figures import figure2_entry

if __name__ == "__main__":
    sys.exit(figure2_entry())
