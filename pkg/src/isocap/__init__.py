"""Isocapacitary criteria, rearrangement bounds and a weighted 1D p-Laplace oracle
for Neumann problems on irregular domains."""

from .bounds import (BoundCurve, gradient_rearrangement_bound, marcinkiewicz_curve,
                     solution_rearrangement_bound, stability_exponents)
from .criteria import (CriterionReport, embedding_condition, gradient_norm_condition,
                       lorentz_gradient_condition, solution_norm_condition, wellposedness,
                       wellposedness_via_lambda)
from .domains import (DomainSpec, IsocapFn, IsoperFn, interval_model, lambda_iso, nu_from_lambda,
                      nu_p, radial_model)
from .rearrange import RearrangedDatum, SampledFn, StepFunction, decreasing_rearrangement
from .solver import NeumannSolution, solve_weighted_neumann

__version__ = "0.1.0"
