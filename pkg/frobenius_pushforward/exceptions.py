class ValidationError(ValueError):
    """Input rejected before any computation (CLI exit code 2)."""


class ResourceBoundExceeded(RuntimeError):
    """A requested matrix would exceed the configured size bound (CLI exit code 3)."""


def check_resource_bound(size, max_size, what="r_e"):
    if max_size is not None and size > max_size:
        raise ResourceBoundExceeded(f"{what} = {size} exceeds the configured bound {max_size}")
