"""Arbitrage-free query pricing: the min-over-support-sets price function,
single-price and multi-price revenue schemes, and a benchmark harness."""

from querypricing.core import (
    EPS, Buyer, CutGraphDemand, ExplicitDemand, Instance, InstanceFormatError, RevenueReport,
    ValidationError, evaluate_revenue, load_instance, save_instance, validate_instance,
)
from querypricing.gen import GenConfig, gen_cut_instance, gen_single_minded, gen_subset_sum_gadget
from querypricing.oracle import QuoteResult, UndeterminableDemand, min_support_size, quote
from querypricing.schemes import (
    SCHEMES, ContractError, PricingResult, combinatorial_multi_price, deterministic_single_price,
    lp_multi_price, optimal_exponential, random_single_price, run_scheme,
)

__version__ = "0.1.0"
