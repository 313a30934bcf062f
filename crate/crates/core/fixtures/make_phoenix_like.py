"""Writes phoenix_like_june_tmax.csv: synthetic June daily maxima for one
station, 1950-2019, with a 0.05 F/yr warming trend plus seeded noise."""

import calendar
import random

rng = random.Random(2)
with open("phoenix_like_june_tmax.csv", "w", newline="") as f:
    f.write("STATION,NAME,DATE,TMAX\n")
    for year in range(1950, 2020):
        level = 104.0 + 0.05 * (year - 1950)
        for day in range(1, calendar.monthrange(year, 6)[1] + 1):
            # A hot spell late in the month keeps the top days well separated.
            bump = 4.0 if 20 <= day <= 24 else 0.0
            tmax = level + bump + rng.gauss(0.0, 1.0)
            f.write(f"USW00023183,PHOENIX-LIKE SYNTHETIC,{year}-06-{day:02d},{tmax:.1f}\n")
