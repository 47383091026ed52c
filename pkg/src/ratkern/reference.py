"""Published reference values for the reduce-then-magnify experiment.

Each table maps a row label to per-image values in :data:`IMAGE_NAMES` order.
The best-cubic rows carry ``(value, a02)`` pairs.  Rows for kernels outside
this package (the continued-fraction S2/2 kernel) are included for completeness
but are never recomputed.
"""

from __future__ import annotations

from .kernels import KernelSpec

IMAGE_NAMES = (
    "Baboon",
    "Barbara",
    "Bike",
    "Boats",
    "Cameraman",
    "Hat",
    "Parrots",
    "Pentagon",
    "Peppers",
    "Straw",
)

#: The four fixed-parameter rational kernels reported in the tables.
FIXED_KERNELS = (
    KernelSpec.of("s41v4", a01=30, a02=20, a03=-121.5512),
    KernelSpec.of("s41v4", a01=80, a02=100, a03=-444.7992),
    KernelSpec.of("s41v5", a01=30, a02=10, a03=-90.1572),
    KernelSpec.of("s41v5", a01=50, a02=10, a03=-129.3052),
)

#: Planes ``a03 = c0 + c1*a01 + c2*a02`` fitted to the better-than-baseline regions.
PUBLISHED_PLANES = {
    "s41v4": (-5.7392, -2.0, -2.7906),
    "s41v5": (-5.7902, -1.9574, -2.5645),
}

#: Search grid of the rational sweep: (lo, hi) per parameter at step 1.
SWEEP_RANGES = {"a01": (-0.9, 70.0), "a02": (-16.0, 45.0), "a03": (-150.0, -5.0)}
SWEEP_STEP = 1.0

#: Best-cubic search grid.
CUBIC_RANGE = (-7.0, 1.0)
CUBIC_STEP = 0.005

PSNR_TABLE = {
    "nearest": (18.4118, 22.0045, 19.2654, 22.4668, 21.5854, 25.6885, 23.6639, 21.8686, 21.8422, 18.5147),
    "linear": (18.5556, 22.4552, 19.8013, 23.4429, 22.1863, 26.3345, 24.3380, 22.2607, 22.9738, 18.6608),
    "best_cubic": (
        (18.7618, -1.805),
        (22.7464, -2.175),
        (20.4352, -1.965),
        (24.3737, -1.960),
        (22.7384, -2.005),
        (26.8300, -2.120),
        (25.1072, -1.990),
        (22.9283, -1.850),
        (23.8671, -2.035),
        (19.1962, -1.810),
    ),
    "s22": (18.7637, 22.7582, 20.4516, 24.3964, 22.7480, 26.8452, 25.1410, 22.9315, 23.9057, 19.1877),
    str(FIXED_KERNELS[0]): (18.7876, 22.7917, 20.5335, 24.5061, 22.8220, 26.9177, 25.2749, 23.0157, 23.9955, 19.2776),
    str(FIXED_KERNELS[1]): (18.8034, 22.7941, 20.5662, 24.5456, 22.8449, 26.9365, 25.3517, 23.0619, 24.0055, 19.3343),
    str(FIXED_KERNELS[2]): (18.7761, 22.7784, 20.4902, 24.4480, 22.7740, 26.8778, 25.2105, 22.9739, 23.9391, 19.2317),
    str(FIXED_KERNELS[3]): (18.7725, 22.7706, 20.4835, 24.4428, 22.7740, 26.8708, 25.1922, 22.9643, 23.9377, 19.2216),
}

SSIM_TABLE = {
    "nearest": (0.2156, 0.4123, 0.6283, 0.3824, 0.2736, 0.9319, 0.8278, 0.3549, 0.4409, 0.3034),
    "linear": (0.2029, 0.4644, 0.6478, 0.4128, 0.2729, 0.9368, 0.8521, 0.3509, 0.4964, 0.2697),
    "best_cubic": (
        (0.2615, -0.710),
        (0.5006, -2.170),
        (0.6880, -1.920),
        (0.4653, -1.930),
        (0.3101, -1.930),
        (0.9402, -2.430),
        (0.8659, -2.255),
        (0.4443, -1.270),
        (0.5400, -2.145),
        (0.3836, -0.800),
    ),
    "s22": (0.2490, 0.5045, 0.6898, 0.4680, 0.3109, 0.9393, 0.8659, 0.4346, 0.5426, 0.3587),
    str(FIXED_KERNELS[0]): (0.2580, 0.5116, 0.6966, 0.4776, 0.3198, 0.9402, 0.8688, 0.4487, 0.5500, 0.3761),
    str(FIXED_KERNELS[1]): (0.2686, 0.5184, 0.7022, 0.4862, 0.3270, 0.9402, 0.8704, 0.4641, 0.5551, 0.3956),
    str(FIXED_KERNELS[2]): (0.2553, 0.5108, 0.6943, 0.4745, 0.3154, 0.9396, 0.8673, 0.4445, 0.5473, 0.3703),
    str(FIXED_KERNELS[3]): (0.2530, 0.5081, 0.6928, 0.4724, 0.3142, 0.9396, 0.8670, 0.4410, 0.5459, 0.3662),
}

FSIM_TABLE = {
    "nearest": (0.5836, 0.6922, 0.6346, 0.6908, 0.6910, 0.7473, 0.7920, 0.6244, 0.7207, 0.5923),
    "linear": (0.5859, 0.7489, 0.7022, 0.7800, 0.7371, 0.7878, 0.8678, 0.6789, 0.8164, 0.5798),
    "best_cubic": (
        (0.7178, 0.735),
        (0.7816, -1.855),
        (0.7371, -1.905),
        (0.8007, -2.185),
        (0.7476, -2.355),
        (0.8014, -2.275),
        (0.8816, -2.295),
        (0.7329, -1.325),
        (0.8306, -2.325),
        (0.7213, -0.170),
    ),
    "s22": (0.6514, 0.7846, 0.7381, 0.8007, 0.7456, 0.8013, 0.8820, 0.7267, 0.8298, 0.6629),
    str(FIXED_KERNELS[0]): (0.6622, 0.7900, 0.7443, 0.8045, 0.7489, 0.8050, 0.8855, 0.7351, 0.8328, 0.6779),
    str(FIXED_KERNELS[1]): (0.6756, 0.7962, 0.7494, 0.8063, 0.7502, 0.8075, 0.8881, 0.7433, 0.8340, 0.6944),
    str(FIXED_KERNELS[2]): (0.6584, 0.7892, 0.7417, 0.8029, 0.7470, 0.8037, 0.8846, 0.7318, 0.8322, 0.6718),
    str(FIXED_KERNELS[3]): (0.6562, 0.7873, 0.7407, 0.8026, 0.7468, 0.8028, 0.8837, 0.7304, 0.8313, 0.6693),
}

TABLES = {"psnr": PSNR_TABLE, "ssim": SSIM_TABLE, "fsim": FSIM_TABLE}


def published(metric: str, row: str, image: str):
    """Published value for ``row`` on ``image`` (``(value, a02)`` for ``best_cubic``)."""
    table = TABLES[metric]
    return table[row][IMAGE_NAMES.index(image)]
