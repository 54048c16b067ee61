class EitlsError(Exception):
    """Root of every error raised by the eitls package."""
    pass
