"""Deterministic 64-bit seed derivation.

Every random draw in the package is keyed by an unsigned 64-bit seed derived
from a master seed through splitmix64, so any single trial or substream can
be replayed in isolation.
"""

_MASK = (1 << 64) - 1
_GOLDEN = 0x9E3779B97F4A7C15

# substream tags, xor-ed into a trial seed before mixing
PLACEMENT_STREAM = 0x1
FADING_STREAM = 0x2
NOISE_STREAM = 0x3


def splitmix64(value):
    """One splitmix64 step: mixes a 64-bit value into a new 64-bit value."""
    z = (int(value) + _GOLDEN) & _MASK
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK
    return (z ^ (z >> 31)) & _MASK


def trial_seed(master_seed, trial):
    """Derived seed number `trial` under `master_seed`.

    splitmix64(master + GOLDEN * trial).  The experiment harness applies this
    twice: once with the sweep-point index to get a scenario seed, then with
    the trial index to get the per-trial seed, so every (sweep point, trial)
    pair draws independent channels and any single trial can be replayed from
    its recorded seed.
    """
    return splitmix64((int(master_seed) + _GOLDEN * int(trial)) & _MASK)


def substream_seed(seed, stream_tag):
    """Independent seed for a named substream of one trial."""
    return splitmix64(int(seed) ^ (int(stream_tag) * _GOLDEN & _MASK))
