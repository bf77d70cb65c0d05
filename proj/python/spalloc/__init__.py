"""Strategyproof two-agent allocation of divisible items."""

from ._core import (
    Mechanism,
    check_bound_certificate,
    check_rochet,
    check_sp,
    check_sufficient_condition,
    competitive_ratio,
    f_five_sixths,
    first_best,
    five_sixths_prices,
    five_sixths_purchase,
    gc_lambda,
    l_lower,
    measure_ratio,
    mechanism_ids,
    pa_ratio_certificate,
    social_welfare,
    solve_qr,
    solve_weighted_product,
    u_upper,
)

__all__ = [
    "Mechanism",
    "check_bound_certificate",
    "check_rochet",
    "check_sp",
    "check_sufficient_condition",
    "competitive_ratio",
    "f_five_sixths",
    "first_best",
    "five_sixths_prices",
    "five_sixths_purchase",
    "gc_lambda",
    "l_lower",
    "measure_ratio",
    "mechanism_ids",
    "pa_ratio_certificate",
    "social_welfare",
    "solve_qr",
    "solve_weighted_product",
    "u_upper",
]
