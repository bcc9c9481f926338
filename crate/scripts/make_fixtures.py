#!/usr/bin/env python3
"""Generates the bundled spectral data fixtures under crates/core/data/.

Sources:
  - CIE 1931 2-degree color matching functions, abridged to 10 nm (public CIE tables).
  - CIE standard illuminant D65 relative SPD, abridged to 10 nm (public CIE tables).
  - CIEDE2000 verification pairs from the published Sharma/Wu/Dalal test dataset.
  - 24-patch chart reflectances: smooth spectral reconstructions fitted to the
    classic ColorChecker sRGB renderings (not measured data; see README).
  - 8 color-rendering test samples: smooth reconstructions of moderate-chroma
    hues spanning the hue circle at equal lightness.
  - 10-LED Gaussian emission profiles and 4 synthetic camera sensitivities.

Run from the repo root:  python3 scripts/make_fixtures.py
"""

import os

import numpy as np
from scipy.optimize import minimize

OUT = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")

WL = np.arange(400.0, 721.0, 10.0)  # 33 samples
DL = 10.0

# CIE 1931 2-degree standard observer, 400-720 nm at 10 nm.
CMF = np.array([
    # x_bar   y_bar   z_bar
    [0.0143, 0.0004, 0.0679],
    [0.0435, 0.0012, 0.2074],
    [0.1344, 0.0040, 0.6456],
    [0.2839, 0.0116, 1.3856],
    [0.3483, 0.0230, 1.7471],
    [0.3362, 0.0380, 1.7721],
    [0.2908, 0.0600, 1.6692],
    [0.1954, 0.0910, 1.2876],
    [0.0956, 0.1390, 0.8130],
    [0.0320, 0.2080, 0.4652],
    [0.0049, 0.3230, 0.2720],
    [0.0093, 0.5030, 0.1582],
    [0.0633, 0.7100, 0.0782],
    [0.1655, 0.8620, 0.0422],
    [0.2904, 0.9540, 0.0203],
    [0.4334, 0.9950, 0.0087],
    [0.5945, 0.9950, 0.0039],
    [0.7621, 0.9520, 0.0021],
    [0.9163, 0.8700, 0.0017],
    [1.0263, 0.7570, 0.0011],
    [1.0622, 0.6310, 0.0008],
    [1.0026, 0.5030, 0.0003],
    [0.8544, 0.3810, 0.0002],
    [0.6424, 0.2650, 0.0000],
    [0.4479, 0.1750, 0.0000],
    [0.2835, 0.1070, 0.0000],
    [0.1649, 0.0610, 0.0000],
    [0.0874, 0.0320, 0.0000],
    [0.0468, 0.0170, 0.0000],
    [0.0227, 0.0082, 0.0000],
    [0.0114, 0.0041, 0.0000],
    [0.0058, 0.0021, 0.0000],
    [0.0029, 0.0010, 0.0000],
])

# CIE standard illuminant D65, relative SPD, 400-720 nm at 10 nm.
D65 = np.array([
    82.7549, 91.4860, 93.4318, 86.6823, 104.8650, 117.0080, 117.8120,
    114.8610, 115.9230, 108.8110, 109.3540, 107.8020, 104.7900, 107.6890,
    104.4050, 104.0460, 100.0000, 96.3342, 95.7880, 88.6856, 90.0062,
    89.5991, 87.6987, 83.2886, 83.6992, 80.0268, 80.2146, 82.2778,
    78.2842, 69.7213, 71.6091, 74.3490, 61.6040,
])

M_SRGB = np.array([
    [0.4124564, 0.3575761, 0.1804375],
    [0.2126729, 0.7151522, 0.0721750],
    [0.0193339, 0.1191920, 0.9503041],
])

Y_FULL = float((CMF[:, 1] * D65).sum() * DL)
WHITE = (CMF * D65[:, None]).sum(axis=0) * DL / Y_FULL  # Y normalized to 1


def xyz_of(refl):
    """Relative XYZ (perfect reflector Y == 1) of a reflectance under D65."""
    return (CMF * (D65 * refl)[:, None]).sum(axis=0) * DL / Y_FULL


def srgb_to_linear(c8):
    c = np.asarray(c8, dtype=float) / 255.0
    return np.where(c <= 0.04045, c / 12.92, ((c + 0.055) / 1.055) ** 2.4)


def lab_of(xyz, white=WHITE):
    t = np.asarray(xyz, dtype=float) / white
    d = 6.0 / 29.0
    f = np.where(t > d**3, np.cbrt(t), t / (3 * d * d) + 4.0 / 29.0)
    return np.array([116 * f[1] - 16, 500 * (f[0] - f[1]), 200 * (f[1] - f[2])])


def lab_to_xyz(lab, white=WHITE):
    l, a, b = lab
    fy = (l + 16) / 116
    fx = fy + a / 500
    fz = fy - b / 200
    d = 6.0 / 29.0

    def inv(f):
        return f**3 if f > d else 3 * d * d * (f - 4.0 / 29.0)

    return np.array([inv(fx), inv(fy), inv(fz)]) * white


def ciede2000(lab1, lab2):
    L1, a1, b1 = lab1
    L2, a2, b2 = lab2
    C1 = np.hypot(a1, b1)
    C2 = np.hypot(a2, b2)
    Cb = (C1 + C2) / 2
    G = 0.5 * (1 - np.sqrt(Cb**7 / (Cb**7 + 25.0**7)))
    a1p, a2p = (1 + G) * a1, (1 + G) * a2
    C1p, C2p = np.hypot(a1p, b1), np.hypot(a2p, b2)
    h1p = np.degrees(np.arctan2(b1, a1p)) % 360 if (a1p or b1) else 0.0
    h2p = np.degrees(np.arctan2(b2, a2p)) % 360 if (a2p or b2) else 0.0
    dL = L2 - L1
    dC = C2p - C1p
    if C1p * C2p == 0:
        dh = 0.0
    else:
        dh = h2p - h1p
        if dh > 180:
            dh -= 360
        elif dh < -180:
            dh += 360
    dH = 2 * np.sqrt(C1p * C2p) * np.sin(np.radians(dh) / 2)
    Lb = (L1 + L2) / 2
    Cbp = (C1p + C2p) / 2
    if C1p * C2p == 0:
        hbp = h1p + h2p
    elif abs(h1p - h2p) <= 180:
        hbp = (h1p + h2p) / 2
    elif h1p + h2p < 360:
        hbp = (h1p + h2p + 360) / 2
    else:
        hbp = (h1p + h2p - 360) / 2
    T = (1 - 0.17 * np.cos(np.radians(hbp - 30)) + 0.24 * np.cos(np.radians(2 * hbp))
         + 0.32 * np.cos(np.radians(3 * hbp + 6)) - 0.20 * np.cos(np.radians(4 * hbp - 63)))
    dtheta = 30 * np.exp(-(((hbp - 275) / 25) ** 2))
    RC = 2 * np.sqrt(Cbp**7 / (Cbp**7 + 25.0**7))
    SL = 1 + 0.015 * (Lb - 50) ** 2 / np.sqrt(20 + (Lb - 50) ** 2)
    SC = 1 + 0.045 * Cbp
    SH = 1 + 0.015 * Cbp * T
    RT = -np.sin(np.radians(2 * dtheta)) * RC
    return float(np.sqrt((dL / SL) ** 2 + (dC / SC) ** 2 + (dH / SH) ** 2
                         + RT * (dC / SC) * (dH / SH)))


def fit_reflectance(xyz_target, smoothness=4e-5):
    """Fit a smooth reflectance in (0, 1) whose XYZ under D65 hits the target."""
    y0 = float(np.clip(xyz_target[1], 1e-3, 0.97))
    z0 = np.full(33, np.log(y0 / (1 - y0)))

    def loss(z):
        r = 1 / (1 + np.exp(-z))
        e = xyz_of(r) - xyz_target
        d2 = np.diff(z, n=2)
        return float(e @ e + smoothness * (d2 @ d2))

    res = minimize(loss, z0, method="L-BFGS-B", options={"maxiter": 4000})
    return 1 / (1 + np.exp(-res.x))


# Classic ColorChecker sRGB renderings (8-bit).
CHART_SRGB = [
    ("dark_skin", (115, 82, 68)),
    ("light_skin", (194, 150, 130)),
    ("blue_sky", (98, 122, 157)),
    ("foliage", (87, 108, 67)),
    ("blue_flower", (133, 128, 177)),
    ("bluish_green", (103, 189, 170)),
    ("orange", (214, 126, 44)),
    ("purplish_blue", (80, 91, 166)),
    ("moderate_red", (193, 90, 99)),
    ("purple", (94, 60, 108)),
    ("yellow_green", (157, 188, 64)),
    ("orange_yellow", (224, 163, 46)),
    ("blue", (56, 61, 150)),
    ("green", (70, 148, 73)),
    ("red", (175, 54, 60)),
    ("yellow", (231, 199, 31)),
    ("magenta", (187, 86, 149)),
    ("cyan", (8, 133, 161)),
    ("white", (243, 243, 242)),
    ("neutral_8", (200, 200, 200)),
    ("neutral_65", (160, 160, 160)),
    ("neutral_5", (122, 122, 121)),
    ("neutral_35", (85, 85, 85)),
    ("black", (52, 52, 52)),
]

# Rendering-check samples: moderate-chroma hues around the circle at L* ~ 61.7
# (Lab targets; chroma kept inside the smooth-reflectance gamut).
CRI_SAMPLE_LAB = [
    ("sample_1", (61.7, 19.6, 10.0)),
    ("sample_2", (61.7, -0.8, 22.0)),
    ("sample_3", (61.7, -24.0, 31.0)),
    ("sample_4", (61.7, -31.0, 11.3)),
    ("sample_5", (61.7, -20.7, -7.5)),
    ("sample_6", (61.7, 1.4, -39.0)),
    ("sample_7", (61.7, 21.2, -33.9)),
    ("sample_8", (61.7, 36.8, -15.6)),
]

LED_CENTERS = [405, 430, 455, 480, 505, 530, 560, 590, 620, 660]
LED_FWHM = 20.0

# Synthetic camera channel models: per channel, list of (center, sigma, weight).
# The violet and deep-red secondary lobes mirror how real sensor filters keep
# responding where the human luminous sensitivity has already collapsed.
CAMERAS = [
    ("synth_a", {
        "r": [(600, 28, 1.0), (672, 18, 0.55)],
        "g": [(535, 33, 1.0), (405, 12, 0.045), (660, 20, 0.030)],
        "b": [(455, 20, 1.0), (403, 12, 0.50)],
    }),
    ("synth_b", {
        "r": [(610, 30, 1.0), (585, 20, 0.20), (685, 20, 0.40)],
        "g": [(545, 36, 1.0), (408, 14, 0.060)],
        "b": [(465, 22, 1.0), (405, 13, 0.42)],
    }),
    ("synth_c", {
        "r": [(595, 26, 1.0), (668, 22, 0.50)],
        "g": [(528, 30, 1.0), (560, 40, 0.15), (402, 11, 0.050), (665, 25, 0.025)],
        "b": [(450, 19, 1.0), (404, 12, 0.60)],
    }),
    ("synth_d", {
        "r": [(605, 32, 1.0), (680, 18, 0.45)],
        "g": [(540, 34, 1.0), (500, 25, 0.10), (406, 13, 0.050)],
        "b": [(460, 21, 1.0), (402, 13, 0.50)],
    }),
]

# Published CIEDE2000 verification pairs (L1 a1 b1 L2 a2 b2 expected).
CIEDE2000_PAIRS = [
    (50.0000, 2.6772, -79.7751, 50.0000, 0.0000, -82.7485, 2.0425),
    (50.0000, 3.1571, -77.2803, 50.0000, 0.0000, -82.7485, 2.8615),
    (50.0000, 2.8361, -74.0200, 50.0000, 0.0000, -82.7485, 3.4412),
    (50.0000, -1.3802, -84.2814, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, -1.1848, -84.8006, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, -0.9009, -85.5211, 50.0000, 0.0000, -82.7485, 1.0000),
    (50.0000, 0.0000, 0.0000, 50.0000, -1.0000, 2.0000, 2.3669),
    (50.0000, -1.0000, 2.0000, 50.0000, 0.0000, 0.0000, 2.3669),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0009, 7.1792),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0010, 7.1792),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0011, 7.2195),
    (50.0000, 2.4900, -0.0010, 50.0000, -2.4900, 0.0012, 7.2195),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0009, -2.4900, 4.8045),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0010, -2.4900, 4.8045),
    (50.0000, -0.0010, 2.4900, 50.0000, 0.0011, -2.4900, 4.7461),
    (50.0000, 2.5000, 0.0000, 50.0000, 0.0000, -2.5000, 4.3065),
    (50.0000, 2.5000, 0.0000, 73.0000, 25.0000, -18.0000, 27.1492),
    (50.0000, 2.5000, 0.0000, 61.0000, -5.0000, 29.0000, 22.8977),
    (50.0000, 2.5000, 0.0000, 56.0000, -27.0000, -3.0000, 31.9030),
    (50.0000, 2.5000, 0.0000, 58.0000, 24.0000, 15.0000, 19.4535),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.1736, 0.5854, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.2972, 0.0000, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 1.8634, 0.5757, 1.0000),
    (50.0000, 2.5000, 0.0000, 50.0000, 3.2592, 0.3350, 1.0000),
    (60.2574, -34.0099, 36.2677, 60.4626, -34.1751, 39.4387, 1.2644),
    (63.0109, -31.0961, -5.8663, 62.8187, -29.7946, -4.0864, 1.2630),
    (61.2901, 3.7196, -5.3901, 61.4292, 2.2480, -4.9620, 1.8731),
    (35.0831, -44.1164, 3.7933, 35.0232, -40.0716, 1.5901, 1.8645),
    (22.7233, 20.0904, -46.6940, 23.0331, 14.9730, -42.5619, 2.0373),
    (36.4612, 47.8580, 18.3852, 36.2715, 50.5065, 21.2231, 1.4146),
    (90.8027, -2.0831, 1.4410, 91.1528, -1.6435, 0.0447, 1.4441),
    (90.9257, -0.5406, -0.9208, 88.6381, -0.8985, -0.7239, 1.5381),
    (6.7747, -0.2908, -2.4247, 5.8714, -0.0985, -2.2286, 0.6377),
    (2.0776, 0.0795, -1.1350, 0.9033, -0.0636, -0.5514, 0.9082),
]


def gaussian(center, sigma):
    return np.exp(-0.5 * ((WL - center) / sigma) ** 2)


def write_csv(name, header, rows):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        f.write(",".join(header) + "\n")
        for row in rows:
            f.write(",".join(row) + "\n")
    print(f"wrote {path}")


def main():
    os.makedirs(OUT, exist_ok=True)

    # Sanity: chromaticities of the bundled tables.
    xyz_d65 = (CMF * D65[:, None]).sum(axis=0)
    xy_d65 = xyz_d65[:2] / xyz_d65.sum()
    xyz_e = CMF.sum(axis=0)
    xy_e = xyz_e[:2] / xyz_e.sum()
    print(f"D65 chromaticity: ({xy_d65[0]:.5f}, {xy_d65[1]:.5f})  expect ~(0.3127, 0.3290)")
    print(f"flat-spectrum chromaticity: ({xy_e[0]:.5f}, {xy_e[1]:.5f})  expect ~(0.3333, 0.3333)")

    write_csv(
        "cie1931_cmf.csv",
        ["wavelength_nm", "x_bar", "y_bar", "z_bar"],
        [[f"{WL[i]:.1f}"] + [f"{CMF[i, c]:.4f}" for c in range(3)] for i in range(33)],
    )
    write_csv(
        "d65.csv",
        ["wavelength_nm", "power"],
        [[f"{WL[i]:.1f}", f"{D65[i]:.4f}"] for i in range(33)],
    )
    write_csv(
        "ciede2000_pairs.csv",
        ["l1", "a1", "b1", "l2", "a2", "b2", "expected"],
        [[f"{v:.4f}" for v in row] for row in CIEDE2000_PAIRS],
    )

    # Self-check the local CIEDE2000 against the published pairs.
    worst = max(abs(ciede2000(r[0:3], r[3:6]) - r[6]) for r in CIEDE2000_PAIRS)
    print(f"local CIEDE2000 worst deviation on published pairs: {worst:.2e}")
    assert worst < 1e-4

    # 24-patch chart.
    refls = []
    print("chart fit quality (deltaE00 vs target):")
    for name, srgb in CHART_SRGB:
        xyz_t = M_SRGB @ srgb_to_linear(srgb)
        r = fit_reflectance(xyz_t)
        de = ciede2000(lab_of(xyz_of(r)), lab_of(xyz_t))
        print(f"  {name:14s} dE={de:7.4f}  r in [{r.min():.3f}, {r.max():.3f}]")
        refls.append((name, r, de))
    assert max(d for _, _, d in refls) < 0.5, "chart fit too loose"
    write_csv(
        "colorchecker.csv",
        ["wavelength_nm"] + [n for n, _, _ in refls],
        [[f"{WL[i]:.1f}"] + [f"{r[i]:.6f}" for _, r, _ in refls] for i in range(33)],
    )

    # Rendering-check samples.
    samples = []
    print("rendering-sample fit quality:")
    for name, lab in CRI_SAMPLE_LAB:
        xyz_t = lab_to_xyz(np.array(lab))
        r = fit_reflectance(xyz_t)
        de = ciede2000(lab_of(xyz_of(r)), np.array(lab))
        print(f"  {name:10s} dE={de:7.4f}  r in [{r.min():.3f}, {r.max():.3f}]")
        samples.append((name, r, de))
    assert max(d for _, _, d in samples) < 0.5, "sample fit too loose"
    write_csv(
        "cri_samples.csv",
        ["wavelength_nm"] + [n for n, _, _ in samples],
        [[f"{WL[i]:.1f}"] + [f"{r[i]:.6f}" for _, r, _ in samples] for i in range(33)],
    )

    # LED bank: Gaussian lines, sampled then renormalized to unit peak.
    sigma = LED_FWHM / (2.0 * np.sqrt(2.0 * np.log(2.0)))
    leds = []
    for c in LED_CENTERS:
        p = gaussian(c, sigma)
        leds.append((f"led_{c}", p / p.max()))
    write_csv(
        "led_bank.csv",
        ["wavelength_nm"] + [n for n, _ in leds],
        [[f"{WL[i]:.1f}"] + [f"{p[i]:.9f}" for _, p in leds] for i in range(33)],
    )

    # Synthetic cameras, one row per camera: name, r_400..r_720, g_..., b_...
    header = ["camera"]
    for ch in ("r", "g", "b"):
        header += [f"{ch}_{int(w)}" for w in WL]
    rows = []
    for name, chans in CAMERAS:
        vals = []
        for ch in ("r", "g", "b"):
            curve = np.zeros(33)
            for center, sig, weight in chans[ch]:
                curve += weight * gaussian(center, sig)
            curve /= curve.max()
            vals += [f"{v:.9f}" for v in curve]
        rows.append([name] + vals)
    write_csv("cameras_synthetic.csv", header, rows)

    print("done")


if __name__ == "__main__":
    main()
