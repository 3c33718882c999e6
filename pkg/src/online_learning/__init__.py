__version__ = '0.1.0'

from .Cluster_Bank import (
    DEFAULT_M_MIN,
    DEFAULT_RHO,
    BankNotInitializedError,
    ClusterBank,
    ClusterState,
    GbtUnavailableError,
    derive_gbt,
    gbt_available,
    nearest_cluster,
    process_block,
    update_centroid,
    update_msd,
)
from .Utils import (
    Template,
    TemplateUnavailableError,
    block_ssd_sums,
    extract_template,
    template_available,
)
