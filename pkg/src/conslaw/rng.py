"""Deterministic random-stream derivation.

All samplers in this package draw from counter-based Philox generators keyed
by ``(seed, stream key)``.  A stream key identifies a logical task (a path
index, a replicate index, a named subsystem), never a worker, so results are
bit-identical regardless of how work is scheduled or how many threads run.
"""

import numpy as np

# Fixed component names so independent subsystems never collide on a key.
# Values are arbitrary but frozen: changing them changes every stream.
COMPONENT_IDS = {
    "bm": 1,
    "excursion": 2,
    "bessel_bridge": 3,
    "levy_brownian": 4,
    "levy_jumps": 5,
    "bridge_refine": 6,
    "argmax_mc": 7,
    "profile": 8,
    "density_mc": 9,
    "walk_oracle": 10,
}


def stream(seed, *key):
    """Return a ``numpy.random.Generator`` for the substream ``key``.

    Parameters
    ----------
    seed : int
        Base seed for the whole experiment.
    *key : int
        Stream coordinates, e.g. ``(component_id, path_index)``.  Equal
        ``(seed, key)`` always yields the same generator state; distinct
        keys yield statistically independent streams.
    """
    if not all(isinstance(k, (int, np.integer)) for k in key):
        raise TypeError("stream key components must be integers")
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=tuple(int(k) for k in key))
    return np.random.Generator(np.random.Philox(ss))


def component_stream(seed, component, *key):
    """Stream for a named subsystem; see ``COMPONENT_IDS`` for names."""
    return stream(seed, COMPONENT_IDS[component], *key)
