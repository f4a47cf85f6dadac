import numpy as np
import pytest

from ddsense import DDGrid, FrameConfig, RngStream
from ddsense.core import random_qpsk_symbols


@pytest.fixture
def rng():
    return RngStream(424242, 0).generator()


def qpsk_frame(cfg: FrameConfig, seed: int = 0) -> DDGrid:
    gen = RngStream(seed, 0).generator()
    return DDGrid(random_qpsk_symbols(cfg, gen))


def probe_frame(cfg: FrameConfig) -> DDGrid:
    probe = np.zeros((cfg.N, cfg.M), dtype=complex)
    probe[0, 0] = 1.0
    return DDGrid(probe)


def complex_noise(gen, *shape):
    return gen.normal(size=shape) + 1j * gen.normal(size=shape)
