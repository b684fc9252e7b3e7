"""Exact sampling of stationary chains with unbounded memory.

Build a kernel with a sound lower-bound envelope, pick a marker string
of spontaneous symbols, and draw finite stretches of the unique
compatible stationary chain exactly, by coupling from the past:

    from exactchain import (Alphabet, make_markov_kernel, build_context,
                            sample_stationary, UniformStream)

    kernel = make_markov_kernel(Alphabet.of_size(2), 1, [[0.6, 0.4], [0.4, 0.6]])
    ctx = build_context(kernel, w=(1,))
    run = sample_stationary(ctx, UniformStream(7), 1000)
"""

from .cftp import (CftpRun, RegenerationSplit, regeneration_split,
                   regeneration_time, sample_stationary, simulate_window)
from .decomposition import (MixtureDecomposition, ThresholdSequence,
                            build_mixture, build_thresholds, compare_thresholds,
                            decomposition_table, envelope_oscillation,
                            uniform_threshold)
from .errors import (ConfigError, DepthExceededError, ExactChainError,
                     KMaxExceededError, MalformedTableError, NotIrreducibleError,
                     NotSpontaneousError, StepBudgetError, TooFewBlocksError,
                     ValidationFailure)
from .kernels import (Kernel, MarkovKernel, RenewalKernel, SpontaneousSet,
                      make_constant_kernel, make_markov_kernel,
                      make_renewal_kernel, random_markov_kernel, spontaneous_set)
from .streams import PinnedStream, UniformStream
from .strings import Alphabet, EventualPast, dist_to_last_occurrence
from .update import STAR, SamplerContext, build_context, mixture_depth, update, update_law

__all__ = [name for name in dir() if not name.startswith("_")]
