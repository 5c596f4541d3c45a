from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, TypeVar

from parrom.core.config import settings

T = TypeVar("T")
R = TypeVar("R")


def parallel_map(fn: Callable[[T], R], items: Iterable[T], *, workers: int | None = None) -> list[R]:
    """
    Aplica `fn` a cada elemento conservando el orden de entrada.

    Args:
        fn (Callable): Función pura a evaluar.
        items (Iterable): Elementos de entrada.
        workers (int | None): Tope de hilos; por defecto `settings.threads`.

    Returns:
        list: Resultados en el mismo orden que `items`.
    """
    items = list(items)
    max_workers = min(workers or settings.threads, len(items))
    if max_workers <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(fn, items))
