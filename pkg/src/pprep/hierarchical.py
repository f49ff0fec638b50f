"""Normal hierarchical model and its exact correspondence to power priors.

A two-study hierarchical model with between-study heterogeneity tau2 and a
flat prior on the overall effect produces the same replication-effect
posterior as the power prior model whenever alpha and tau2 are linked by
alpha = var_o / (2 tau2 + var_o). The correspondence extends to random
alpha and tau2: a beta prior on alpha maps to a generalized F prior on
tau2 (scaled by the original study's variance) and to a generalized beta
prior on the relative heterogeneity I2. Hypothesis tests built from
hierarchical marginal likelihoods reproduce the power-prior Bayes factors
under matching prior assignments.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from .bayes_factors import BayesFactorResult, UnitInformation
from .exceptions import DomainError
from .inference import BetaParams, NormalParams, Study, StudyPair
from .quadrature import DEFAULT_QUAD, QuadratureSpec, integrate_semiinf
from .special import (
    GBetaParams,
    GFParams,
    InvGammaParams,
    gf_logpdf,
    invgamma_logpdf,
    normal_logpdf,
)

__all__ = [
    "HierarchicalModel",
    "HeterogeneityPrior",
    "OverallEffectPrior",
    "HierarchicalHypothesis",
    "hier_posterior_theta_r",
    "alpha_to_tau2",
    "tau2_to_alpha",
    "alpha_to_I2",
    "I2_to_alpha",
    "tau2_prior_from_alpha_prior",
    "I2_prior_from_alpha_prior",
    "hier_marginal_posterior_tau2",
    "hier_marginal_posterior_theta_r",
    "hier_evidence",
    "hier_bayes_factor",
    "effect_test_hypotheses",
    "compatibility_point_hypotheses",
    "compatibility_beta_hypotheses",
]


# ---------------------------------------------------------------------------
# Model and prior types
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HierarchicalModel:
    """Two-study normal hierarchy with fixed heterogeneity variance.

    ``flat_prior_scale`` is the arbitrary constant of the flat prior on
    the overall effect; it cancels in every posterior and is kept only so
    reported marginal likelihoods state their convention (k = 1).
    """

    pair: StudyPair
    tau2: float = 0.0
    flat_prior_scale: float = 1.0

    def __post_init__(self):
        if not (self.tau2 >= 0):
            raise DomainError("heterogeneity variance must be nonnegative")
        if not (self.flat_prior_scale > 0):
            raise DomainError("flat prior scale must be positive")


@dataclass(frozen=True)
class HeterogeneityPrior:
    """Prior on the heterogeneity variance: degenerate or continuous."""

    kind: str
    tau2: float | None = None
    gf: GFParams | None = None
    ig: InvGammaParams | None = None

    def __post_init__(self):
        if self.kind == "fixed":
            if self.tau2 is None or self.tau2 < 0:
                raise DomainError("fixed heterogeneity prior needs tau2 >= 0")
        elif self.kind == "generalized_f":
            if self.gf is None:
                raise DomainError("generalized F prior needs parameters")
        elif self.kind == "inverse_gamma":
            if self.ig is None:
                raise DomainError("inverse gamma prior needs parameters")
        else:
            raise DomainError(f"unknown heterogeneity prior kind {self.kind!r}")

    @classmethod
    def fixed(cls, tau2: float) -> "HeterogeneityPrior":
        return cls(kind="fixed", tau2=tau2)

    @classmethod
    def generalized_f(cls, params: GFParams) -> "HeterogeneityPrior":
        return cls(kind="generalized_f", gf=params)

    @classmethod
    def inverse_gamma(cls, params: InvGammaParams) -> "HeterogeneityPrior":
        return cls(kind="inverse_gamma", ig=params)

    @classmethod
    def from_alpha_prior(cls, prior: BetaParams, sigma2_o: float) -> "HeterogeneityPrior":
        """The tau2 prior matching a beta prior on the power parameter."""
        return tau2_prior_from_alpha_prior(prior, sigma2_o)

    @property
    def is_degenerate(self) -> bool:
        return self.kind == "fixed"

    def logpdf(self, tau2):
        """Log prior density at tau2 (continuous kinds only)."""
        if self.kind == "generalized_f":
            return gf_logpdf(tau2, self.gf)
        if self.kind == "inverse_gamma":
            return invgamma_logpdf(tau2, self.ig)
        raise DomainError("a degenerate (fixed) heterogeneity prior has no density")

    @property
    def characteristic_scale(self) -> float:
        """Order of magnitude of the prior mass, used to anchor the
        semi-infinite quadrature substitution."""
        if self.kind == "generalized_f":
            return 1.0 / self.gf.lam
        if self.kind == "inverse_gamma":
            return self.ig.r / (self.ig.q + 1.0)
        raise DomainError("a degenerate (fixed) heterogeneity prior has no scale")


# ---------------------------------------------------------------------------
# Fixed-heterogeneity posterior and the deterministic bridge maps
# ---------------------------------------------------------------------------


def hier_posterior_theta_r(model: HierarchicalModel) -> NormalParams:
    """Posterior of the replication-specific effect at fixed heterogeneity.

    Precision-weighted combination of the replication estimate and the
    original estimate, the latter carrying the extra variance 2 tau2 from
    the two hierarchy levels between the studies.
    """
    rep = model.pair.replication
    orig = model.pair.original
    w_rep = 1.0 / rep.variance
    w_orig = 1.0 / (2.0 * model.tau2 + orig.variance)
    variance = 1.0 / (w_rep + w_orig)
    mean = (rep.estimate * w_rep + orig.estimate * w_orig) * variance
    return NormalParams(mean, variance)


def alpha_to_tau2(alpha: float, sigma2_o: float) -> float:
    """Heterogeneity variance whose fixed-tau2 posterior matches the
    fixed-alpha power prior posterior; infinite at alpha = 0."""
    if not (0.0 <= alpha <= 1.0):
        raise DomainError("alpha must lie in [0, 1]")
    if not (sigma2_o > 0):
        raise DomainError("sigma2_o must be positive")
    if alpha == 0.0:
        return math.inf
    return (1.0 / alpha - 1.0) * sigma2_o / 2.0


def tau2_to_alpha(tau2: float, sigma2_o: float) -> float:
    """Inverse of :func:`alpha_to_tau2`."""
    if not (tau2 >= 0):
        raise DomainError("tau2 must be nonnegative")
    if not (sigma2_o > 0):
        raise DomainError("sigma2_o must be positive")
    return sigma2_o / (2.0 * tau2 + sigma2_o)


def alpha_to_I2(alpha: float) -> float:
    """Relative heterogeneity matching a given power parameter.

    The map (1 - t) / (1 + t) is its own inverse; it stays within 0.06 of
    the rough heuristic I2 ~ 1 - alpha.
    """
    if not (0.0 < alpha <= 1.0):
        raise DomainError("alpha must lie in (0, 1]")
    return (1.0 - alpha) / (1.0 + alpha)


def I2_to_alpha(i2: float) -> float:
    """Power parameter matching a given relative heterogeneity."""
    if not (0.0 <= i2 < 1.0):
        raise DomainError("I2 must lie in [0, 1)")
    return (1.0 - i2) / (1.0 + i2)


def tau2_prior_from_alpha_prior(prior: BetaParams, sigma2_o: float) -> HeterogeneityPrior:
    """Push a beta prior on alpha through the bridge map onto tau2.

    The result is a generalized F prior with swapped shapes and rate
    2 / sigma2_o, so the prior scales with the original study's variance.
    """
    if not (sigma2_o > 0):
        raise DomainError("sigma2_o must be positive")
    return HeterogeneityPrior.generalized_f(
        GFParams(a=prior.y, b=prior.x, lam=2.0 / sigma2_o)
    )


def I2_prior_from_alpha_prior(prior: BetaParams) -> GBetaParams:
    """Push a beta prior on alpha through the Moebius map onto I2."""
    return GBetaParams(a=prior.y, b=prior.x, lam=2.0)


# ---------------------------------------------------------------------------
# Random-heterogeneity posteriors
# ---------------------------------------------------------------------------


def hier_evidence(pair: StudyPair, tau2: float) -> float:
    """Log marginal likelihood of both estimates at fixed heterogeneity,
    reported with the flat-prior constant k = 1; only differences (ratios)
    of these values are meaningful."""
    if not (tau2 >= 0):
        raise DomainError("tau2 must be nonnegative")
    rep, orig = pair.replication, pair.original
    return normal_logpdf(
        rep.estimate, orig.estimate, orig.variance + rep.variance + 2.0 * tau2
    )


@lru_cache(maxsize=512)
def _tau2_posterior_norm(
    pair: StudyPair, prior: HeterogeneityPrior, quad: QuadratureSpec
) -> tuple[float, float]:
    def integrand(tau2: float) -> float:
        return math.exp(hier_evidence(pair, tau2) + prior.logpdf(tau2))

    value, err = integrate_semiinf(integrand, quad, scale=prior.characteristic_scale)
    if value <= 0.0:
        return -math.inf, err
    return math.log(value), err / value


def hier_marginal_posterior_tau2(
    tau2: float,
    pair: StudyPair,
    prior: HeterogeneityPrior,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Marginal posterior log-density of the heterogeneity variance."""
    if prior.is_degenerate:
        raise DomainError("tau2 posterior requires a continuous prior")
    log_norm, _ = _tau2_posterior_norm(pair, prior, quad)
    return hier_evidence(pair, tau2) + prior.logpdf(tau2) - log_norm


def hier_marginal_posterior_theta_r(
    theta: float,
    pair: StudyPair,
    prior: HeterogeneityPrior,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> float:
    """Marginal posterior log-density of the replication-specific effect.

    Mixes the fixed-tau2 normal posterior over the tau2 posterior; both
    the mixture integral and its normalizer run through semi-infinite
    quadrature.
    """
    if prior.is_degenerate:
        cond = hier_posterior_theta_r(HierarchicalModel(pair, prior.tau2))
        return normal_logpdf(theta, cond.mean, cond.variance)
    log_norm, _ = _tau2_posterior_norm(pair, prior, quad)

    def integrand(tau2: float) -> float:
        cond = hier_posterior_theta_r(HierarchicalModel(pair, tau2))
        return math.exp(
            normal_logpdf(theta, cond.mean, cond.variance)
            + hier_evidence(pair, tau2)
            + prior.logpdf(tau2)
        )

    value, _ = integrate_semiinf(integrand, quad, scale=prior.characteristic_scale)
    if value <= 0.0:
        return -math.inf
    return math.log(value) - log_norm


# ---------------------------------------------------------------------------
# Hypothesis tests from hierarchical marginal likelihoods
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class OverallEffectPrior:
    """Prior for the overall effect, possibly conditional on tau2.

    Either a point mass at ``mean`` or a normal with variance
    ``variance`` (+ tau2 when ``add_tau2`` is set, the form taken by the
    posterior of the overall effect given the original data under a flat
    initial prior).
    """

    mean: float
    variance: float = 0.0
    add_tau2: bool = False
    point: bool = False

    def __post_init__(self):
        if not math.isfinite(self.mean):
            raise DomainError("overall effect prior mean must be finite")
        if self.point:
            return
        if self.variance < 0 or not math.isfinite(self.variance):
            raise DomainError("overall effect prior variance must be finite and >= 0")
        if self.variance == 0.0 and not self.add_tau2:
            raise DomainError(
                "overall effect prior is improper/degenerate; use point=True "
                "for a point mass"
            )

    def marginal_variance(self, tau2: float) -> float:
        if self.point:
            return 0.0
        return self.variance + (tau2 if self.add_tau2 else 0.0)


@dataclass(frozen=True)
class HierarchicalHypothesis:
    """A proper joint prior for (overall effect, tau2), or point masses."""

    effect: OverallEffectPrior
    heterogeneity: HeterogeneityPrior
    label: str = ""


def _hier_marginal_likelihood(
    pair: StudyPair, hyp: HierarchicalHypothesis, quad: QuadratureSpec
) -> tuple[float, float]:
    """Log marginal likelihood of the replication estimate and its
    log-scale quadrature error."""
    rep = pair.replication

    def log_cond(tau2: float) -> float:
        var = rep.variance + tau2 + hyp.effect.marginal_variance(tau2)
        return normal_logpdf(rep.estimate, hyp.effect.mean, var)

    het = hyp.heterogeneity
    if het.is_degenerate:
        return log_cond(het.tau2), 0.0

    def integrand(tau2: float) -> float:
        return math.exp(log_cond(tau2) + het.logpdf(tau2))

    value, err = integrate_semiinf(integrand, quad, scale=het.characteristic_scale)
    if value <= 0.0:
        return -math.inf, err
    return math.log(value), err / value


def hier_bayes_factor(
    pair: StudyPair,
    numerator: HierarchicalHypothesis,
    denominator: HierarchicalHypothesis,
    quad: QuadratureSpec = DEFAULT_QUAD,
) -> BayesFactorResult:
    """Bayes factor between two hierarchical hypothesis specifications."""
    log_num, err_num = _hier_marginal_likelihood(pair, numerator, quad)
    log_den, err_den = _hier_marginal_likelihood(pair, denominator, quad)
    return BayesFactorResult(
        log_bf=log_num - log_den,
        orientation=(numerator.label or "numerator", denominator.label or "denominator"),
        quadrature_err=err_num + err_den,
    )


def effect_test_hypotheses(
    original: Study, prior: BetaParams
) -> tuple[HierarchicalHypothesis, HierarchicalHypothesis]:
    """Hierarchical hypothesis pair reproducing the power-prior effect test.

    Null: zero overall effect, no heterogeneity. Alternative: overall
    effect follows the original study's posterior widened by tau2, with
    the bridge-matched generalized F prior on tau2.
    """
    null = HierarchicalHypothesis(
        effect=OverallEffectPrior(mean=0.0, point=True),
        heterogeneity=HeterogeneityPrior.fixed(0.0),
        label="theta* = 0, tau2 = 0",
    )
    alternative = HierarchicalHypothesis(
        effect=OverallEffectPrior(
            mean=original.estimate, variance=original.variance, add_tau2=True
        ),
        heterogeneity=tau2_prior_from_alpha_prior(prior, original.variance),
        label="theta* ~ original posterior, tau2 ~ GF",
    )
    return null, alternative


def compatibility_point_hypotheses(
    original: Study, ui: UnitInformation
) -> tuple[HierarchicalHypothesis, HierarchicalHypothesis]:
    """Hierarchical pair reproducing the point compatibility test.

    Both sides fix tau2 = 0 (a fixed-effects model); discounting keeps the
    raw unit-information prior while pooling updates it with the original
    data.
    """
    s = ui.shrinkage(original.variance)
    discounting = HierarchicalHypothesis(
        effect=OverallEffectPrior(mean=0.0, variance=ui.kappa2),
        heterogeneity=HeterogeneityPrior.fixed(0.0),
        label="theta* ~ unit information, tau2 = 0",
    )
    pooling = HierarchicalHypothesis(
        effect=OverallEffectPrior(mean=s * original.estimate, variance=s * original.variance),
        heterogeneity=HeterogeneityPrior.fixed(0.0),
        label="theta* ~ updated unit information, tau2 = 0",
    )
    return discounting, pooling


def compatibility_beta_hypotheses(
    original: Study, y: float
) -> tuple[HierarchicalHypothesis, HierarchicalHypothesis]:
    """Hierarchical pair reproducing the Be(1, y) compatibility test.

    Both sides give the overall effect the original study's posterior
    widened by tau2; they differ only in tau2 being positive (generalized
    F prior) versus exactly zero.
    """
    effect = OverallEffectPrior(
        mean=original.estimate, variance=original.variance, add_tau2=True
    )
    heterogeneous = HierarchicalHypothesis(
        effect=effect,
        heterogeneity=tau2_prior_from_alpha_prior(BetaParams(1.0, y), original.variance),
        label="tau2 ~ GF",
    )
    homogeneous = HierarchicalHypothesis(
        effect=effect,
        heterogeneity=HeterogeneityPrior.fixed(0.0),
        label="tau2 = 0",
    )
    return heterogeneous, homogeneous
