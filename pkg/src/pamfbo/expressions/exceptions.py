from pamfbo.errors import PamfboError


class ExpressionError(PamfboError):
    """Exception for custom bias expression errors."""
