"""Bar diameter estimation from dual-polarized wideband GPR power ratios."""

__version__ = "0.1.0"

SPEED_OF_LIGHT = 299_792_458.0  # m/s
