"""OTU clustering, the persistent BIN registry, and discordance reporting."""

from barcodelab.binning.resl import ReslParams, OtuCluster, resl_cluster, markov_cluster
from barcodelab.binning.registry import (
    mint_bin_uri,
    update_bin_registry,
    bin_stats,
    run_bin_update,
)
from barcodelab.binning.discordance import bin_discordance

__all__ = [
    "ReslParams",
    "OtuCluster",
    "resl_cluster",
    "markov_cluster",
    "mint_bin_uri",
    "update_bin_registry",
    "bin_stats",
    "run_bin_update",
    "bin_discordance",
]
