class StepCapExceeded(RuntimeError):
    """A walk ran past its step cap, which signals a degenerate ensemble."""
