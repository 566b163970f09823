#!/usr/bin/env python3
"""Regenerate the bundled drive-cycle approximations in data/cycles/.

Each file mimics one standard test cycle's duration, top speed, idle share,
and approximate distance / phase layout. They are hand-built approximations
from the published envelope figures, not the official tabulations.

Usage: python3 tools/make_cycles.py [output_dir]
"""
import math
import os
import sys


def ramp(prof, v1, steps):
    v0 = prof[-1]
    for i in range(1, steps + 1):
        prof.append(v0 + (v1 - v0) * i / steps)


def hold(prof, steps, wiggle=0.0, period=37.0):
    # wiggle dips below the entry speed so ramp peaks stay the cycle maxima
    v = prof[-1]
    for i in range(1, steps + 1):
        w = wiggle * (math.sin(2 * math.pi * i / period) - 1.0) if wiggle else 0.0
        prof.append(max(0.0, v + w))


def idle(prof, steps):
    prof.extend([0.0] * steps)


def pulse(prof, peak, up, cruise, down, rest, wiggle=0.4):
    ramp(prof, peak, up)
    hold(prof, cruise, wiggle)
    ramp(prof, 0.0, down)
    idle(prof, rest)


def kmh(v):
    return v / 3.6


def finish(prof, samples):
    if len(prof) > samples:
        raise SystemExit(f"profile too long: {len(prof)} > {samples}")
    prof.extend([0.0] * (samples - len(prof)))
    return [round(max(0.0, v), 2) for v in prof]


def wltp_c3():
    p = [0.0]
    # low (urban, ~589 s)
    idle(p, 11)
    pulse(p, kmh(40), 15, 16, 12, 5)
    pulse(p, kmh(25), 8, 12, 8, 14)
    pulse(p, kmh(50), 20, 30, 16, 10)
    pulse(p, kmh(56.5), 22, 40, 18, 20)
    pulse(p, kmh(35), 12, 20, 12, 25)
    pulse(p, kmh(30), 10, 24, 10, 12)
    pulse(p, kmh(48), 16, 92, 18, 30)
    # medium (~433 s)
    ramp(p, kmh(50), 22)
    hold(p, 45, 0.6)
    ramp(p, kmh(76.6), 30)
    hold(p, 40, 0.7)
    ramp(p, kmh(35), 28)
    hold(p, 35, 0.5)
    ramp(p, kmh(60), 26)
    hold(p, 60, 0.7)
    ramp(p, kmh(45), 15)
    hold(p, 40, 0.5)
    ramp(p, 0.0, 30)
    idle(p, 22)
    # high (~455 s)
    ramp(p, kmh(60), 28)
    hold(p, 55, 0.8)
    ramp(p, kmh(97.4), 45)
    hold(p, 70, 0.8)
    ramp(p, kmh(55), 35)
    hold(p, 45, 0.6)
    ramp(p, kmh(75), 30)
    hold(p, 40, 0.7)
    ramp(p, 0.0, 35)
    idle(p, 12)
    # extra-high (~323 s)
    ramp(p, kmh(85), 32)
    hold(p, 30, 0.8)
    ramp(p, kmh(105), 28)
    hold(p, 40, 0.9)
    ramp(p, kmh(131.3), 42)
    hold(p, 50, 0.8)
    ramp(p, kmh(90), 25)
    ramp(p, 0.0, 36)
    return finish(p, 1801)


def udds():
    p = [0.0]
    idle(p, 18)
    pulse(p, kmh(35), 12, 14, 10, 6)
    # the long early freeway-ish hill
    ramp(p, kmh(70), 35)
    hold(p, 55, 0.8)
    ramp(p, kmh(91.25), 30)
    hold(p, 55, 0.7)
    ramp(p, kmh(50), 25)
    hold(p, 40, 0.6)
    ramp(p, 0.0, 22)
    idle(p, 14)
    # downtown stop-and-go
    pulse(p, kmh(40), 12, 26, 11, 10)
    pulse(p, kmh(45), 13, 32, 12, 9)
    pulse(p, kmh(32), 9, 18, 9, 12)
    pulse(p, kmh(50), 15, 38, 13, 10)
    pulse(p, kmh(38), 11, 24, 10, 13)
    pulse(p, kmh(55), 16, 45, 14, 9)
    pulse(p, kmh(42), 12, 28, 11, 11)
    pulse(p, kmh(35), 10, 20, 10, 10)
    pulse(p, kmh(48), 14, 36, 12, 10)
    pulse(p, kmh(40), 12, 26, 11, 9)
    pulse(p, kmh(52), 15, 40, 13, 10)
    pulse(p, kmh(36), 10, 20, 10, 8)
    pulse(p, kmh(44), 13, 30, 12, 8)
    pulse(p, kmh(38), 11, 24, 10, 9)
    pulse(p, kmh(30), 9, 16, 9, 7)
    return finish(p, 1370)


def hwfet():
    p = [0.0]
    idle(p, 4)
    ramp(p, kmh(78), 40)
    hold(p, 80, 0.9, 53.0)
    ramp(p, kmh(88), 25)
    hold(p, 100, 0.8, 41.0)
    ramp(p, kmh(70), 20)
    hold(p, 40, 0.6)
    # the mid-cycle dip
    ramp(p, kmh(48), 22)
    hold(p, 20, 0.5)
    ramp(p, kmh(85), 35)
    hold(p, 120, 0.9, 61.0)
    ramp(p, kmh(96.4), 28)
    hold(p, 90, 0.7, 47.0)
    ramp(p, kmh(80), 20)
    hold(p, 80, 0.7)
    ramp(p, 0.0, 30)
    return finish(p, 766)


def nedc():
    p = [0.0]
    # four identical urban segments
    for _ in range(4):
        idle(p, 11 if len(p) > 1 else 10)
        ramp(p, kmh(15), 4)
        hold(p, 8)
        ramp(p, 0.0, 5)
        idle(p, 21)
        ramp(p, kmh(32), 12)
        hold(p, 24)
        ramp(p, 0.0, 11)
        idle(p, 21)
        ramp(p, kmh(50), 26)
        hold(p, 12)
        ramp(p, kmh(35), 8)
        hold(p, 13)
        ramp(p, 0.0, 12)
        idle(p, 7)
    # extra-urban segment
    idle(p, 20)
    ramp(p, kmh(70), 41)
    hold(p, 50)
    ramp(p, kmh(50), 8)
    hold(p, 69)
    ramp(p, kmh(70), 13)
    hold(p, 50)
    ramp(p, kmh(100), 35)
    hold(p, 30)
    ramp(p, kmh(120), 20)
    hold(p, 10)
    ramp(p, 0.0, 34)
    idle(p, 20)
    return finish(p, 1181)


def us06():
    p = [0.0]
    idle(p, 5)
    ramp(p, kmh(54), 4)          # ~3.75 m/s^2 launch
    hold(p, 12, 0.8)
    ramp(p, kmh(80), 5)
    hold(p, 15, 0.8)
    ramp(p, 0.0, 9)
    idle(p, 5)
    ramp(p, kmh(65), 6)
    hold(p, 10, 0.7)
    ramp(p, kmh(40), 5)
    ramp(p, kmh(95), 12)
    hold(p, 20, 0.9)
    ramp(p, 0.0, 12)
    idle(p, 6)
    # freeway portion
    ramp(p, kmh(105), 18)
    hold(p, 60, 1.0, 31.0)
    ramp(p, kmh(129.2), 16)
    hold(p, 70, 0.9, 43.0)
    ramp(p, kmh(100), 12)
    hold(p, 40, 0.8)
    ramp(p, kmh(125), 12)
    hold(p, 70, 0.9, 37.0)
    ramp(p, kmh(110), 8)
    hold(p, 55, 0.8)
    ramp(p, kmh(60), 14)
    hold(p, 14, 0.6)
    ramp(p, 0.0, 14)
    return finish(p, 597)


def fmt(x):
    return f"{x:.10g}"


def write(path, speeds):
    with open(path, "w") as f:
        f.write("time_s,speed_mps,grade\n")
        for i, v in enumerate(speeds):
            f.write(f"{fmt(float(i))},{fmt(v)},0\n")


def stats(name, speeds):
    n = len(speeds)
    dist = sum(speeds)
    idle_n = sum(1 for v in speeds if v < 0.1)
    vmax = max(speeds)
    amax = max(speeds[i] - speeds[i - 1] for i in range(1, n))
    print(f"{name:10s} samples={n:5d} dur={n-1:5d}s dist={dist/1000:7.2f}km "
          f"vmax={vmax*3.6:6.1f}km/h amax={amax:4.2f}m/s2 idle={idle_n/n:5.1%}")


def main():
    out = sys.argv[1] if len(sys.argv) > 1 else "data/cycles"
    os.makedirs(out, exist_ok=True)
    for name, build in [("wltp_c3", wltp_c3), ("udds", udds),
                        ("hwfet", hwfet), ("nedc", nedc), ("us06", us06)]:
        speeds = build()
        stats(name, speeds)
        write(os.path.join(out, f"{name}.csv"), speeds)


if __name__ == "__main__":
    main()
