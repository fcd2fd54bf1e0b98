"""Model reduction of SISO bilinear systems with the bilinear Loewner framework
and moment matching through truncated Loewner functions."""
from .core import (BilinearSystem, GeneratorPair, ValidationReport, resolvent,
                   validate_system)
from .errors import (DegenerateData, GridMismatch, LoewnerError, NonFinite, OutOfRadius,
                     ResonanceError, SingularMass, SingularPencilAt)
from .lofuncs import (LoewnerFunctionSeries, SeriesCoefficients, eval_controllability,
                      kappa_equivalence, loewner_series, observability_map, pde_residual,
                      phi_coefficients)
from .pencil import (LoewnerData, MultiTupleSet, assemble_loewner, blf_rom, blf_tuples,
                     moment_tuples, observability_block, reachability_block)
from .rom import (MomentMatchingROM, build_mm_rom, kappa1_bridge_check, mm_output, mm_rhs,
                  poly_map, reduce_blf)
from .sim import (SimulationTrace, generator_signal, simulate_bilinear, simulate_mm,
                  steady_state_compare)
from .volterra import eval_generalized_tf, eval_tf_grid

__version__ = "0.1.0"
