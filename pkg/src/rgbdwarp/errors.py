"""Exception types shared across the toolkit."""


class RgbdWarpError(Exception):
    """Base class for every error raised by this package."""


class InvalidDepthError(RgbdWarpError):
    """Depth value is zero, negative, or not finite."""


class PixelBoundsError(RgbdWarpError):
    """Pixel coordinate lies outside the image rectangle."""


class BehindCameraError(RgbdWarpError):
    """Point has non-positive z in the camera frame."""


class CalibrationError(RgbdWarpError):
    """Intrinsics or extrinsics file is missing or malformed."""


class SequenceError(RgbdWarpError):
    """RGBD sequence directory violates the expected layout."""


class AllHolesError(RgbdWarpError):
    """Hole filling was asked to fill a mask with no valid pixels."""
