"""Symbolic-dynamics chaos measures for the Lorenz and Rossler models."""

from .models import (BlowUpError, IntegratorConfig, LorenzParams,
                     RosslerParams, State3, Trajectory, integrate,
                     lorenz_rhs, rossler_equilibria, rossler_rhs)
from .events import (CriticalEvent, PeakConfig, SmoothingConfig,
                     derivative_zero_events, find_peaks,
                     mean_inter_event_time, smooth)
from .symbolic import (PartitionSpec, SymbolSequence, encode_lorenz,
                       encode_rossler_threshold, encode_trajectory,
                       read_sequence, write_sequence)
from .complexity import (BlockEntropyProfile, ComplexityReport, LzResult,
                         MarkovMatrix2, block_entropies, compressibility,
                         detect_period, lz76, lz76_phrases, markov_matrix,
                         measure_sequence, periodic_block_entropies,
                         source_entropy_estimate)
from .lyapunov import LyapunovResult, largest_le
from .returnmap import (MapComparison, ReturnMap, build_zmax_map,
                        compare_maps, map_from_maxima)
from .sweep import (StabilityWindow, SweepRecord, SweepSpec,
                    default_partition, detect_stability_windows, run_sweep,
                    sweep_point, write_sweep_csv, write_windows_csv)
from .esn import (EsnDivergenceError, EsnHyperParams, EsnRunResult,
                  TrainedEsn, fit_readout, free_run, init_esn, load_esn,
                  save_esn, spectral_radius, teacher_run, train)
from .fidelity import (FidelityReport, ScoreBreakdown, SearchSpec,
                       TrialResult, encode_surrogate, fidelity_report,
                       random_search, score, train_trial)

__version__ = "0.1.0"
