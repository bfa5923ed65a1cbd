"""Opportunistic interference alignment with 1-bit feedback.

Numerical library and experiment harness for the 3-cell MIMO
interference channel: Grassmannian geometry of the user-selection
metric, threshold design for the 1-bit quantizer, an
interference-alignment baseline with limited feedback, and a FLOP-count
model of the feedback workloads.
"""

from .channel import (ChannelSet, RateRecord, SystemConfig, cell_metrics,
                      generate_channels, interference_covariance,
                      interferer_indices, postfilter, user_metric, user_rate)
from .complexity import (FlopReport, flops_frobenius, flops_gso,
                         flops_ia_individual, flops_ia_joint,
                         flops_matmul_gram, flops_oia_1bit)
from .errors import (ConfigError, DegenerateChannel, IoError, LambertDomain,
                     OddBitSplit, OiaSimError, ShapeMismatch, TooFewUsers,
                     UnknownExperiment)
from .grassmann import (ManifoldParams, Subspace, ball_volume,
                        chordal_distance_sq, metric_cdf, orthonormal_basis,
                        quantization_bound, sample_uniform_subspace)
from .harness import (ExperimentConfig, EXPERIMENTS, ResultRow, make_config,
                      run_experiment, run_trial, write_csv)
from .ia import (AggregatedChannel, CompositeCodebook, IaSolution,
                 aggregate_channel, closed_form_ia, composite_distance,
                 ia_limited_feedback_rate, ia_link_rates, ia_sum_rate,
                 perturb_quantization_model, quantize, quantize_individual,
                 quantized_channel_set)
from .oia import (SelectionOutcome, expected_eligible, expected_metric_one_bit,
                  expected_metric_upper_bound, outage_probability,
                  select_conventional, select_one_bit)
from .threshold import (ThresholdSpec, lambert_w, min_expected_metric_d1,
                        optimal_threshold_d1, threshold_asymptotic,
                        threshold_lambert, threshold_numeric)

__version__ = "0.1.0"
