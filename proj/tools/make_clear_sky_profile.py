#!/usr/bin/env python3
"""Writes the bundled clear-sky irradiance and load-multiplier profile.

GHI follows a sine-power bell between sunrise and sunset; the load
multiplier is a smooth weekday shape peaking at 1.0 in the early evening.
One sample per minute over the whole day.
"""
import argparse
import math

SUNRISE_H = 6.0
SUNSET_H = 18.0
GHI_PEAK = 950.0
SHAPE = 2.6


def ghi(hour):
    if hour <= SUNRISE_H or hour >= SUNSET_H:
        return 0.0
    x = math.pi * (hour - SUNRISE_H) / (SUNSET_H - SUNRISE_H)
    return GHI_PEAK * math.sin(x) ** SHAPE


def load_multiplier(hour):
    base = 0.45
    morning = 0.20 * math.exp(-((hour - 8.0) / 1.5) ** 2)
    midday = 0.12 * math.exp(-((hour - 13.0) / 3.0) ** 2)
    evening = 0.55 * math.exp(-((hour - 19.0) / 2.2) ** 2)
    return min(1.0, base + morning + midday + evening)


def main():
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("output")
    args = parser.parse_args()
    peak = max(load_multiplier(m / 60.0) for m in range(1440))
    with open(args.output, "w", newline="\n") as out:
        out.write("time,ghi,load_mult\n")
        for minute in range(1440):
            hour = minute / 60.0
            out.write(f"{minute // 60:02d}:{minute % 60:02d},{ghi(hour):.2f},{load_multiplier(hour) / peak:.4f}\n")
        out.write("24:00,0.00,%.4f\n" % (load_multiplier(24.0) / peak))


if __name__ == "__main__":
    main()
