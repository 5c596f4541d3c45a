from . import evaluate, generate, reduce

__all__ = ["evaluate", "generate", "reduce"]
