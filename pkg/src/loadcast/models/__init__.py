from .artifact import ModelArtifact, load_artifact, save_artifact
from .gbdt import GbdtParams, TreeEnsemble, TreeNode, fit_gbdt
from .linear import LinearModel, fit_ols
from .lstm import LstmModel, LstmParams, fit_lstm, forward_sequence, init_weights

__all__ = [
    "ModelArtifact", "load_artifact", "save_artifact",
    "LinearModel", "fit_ols",
    "GbdtParams", "TreeEnsemble", "TreeNode", "fit_gbdt",
    "LstmModel", "LstmParams", "fit_lstm", "forward_sequence", "init_weights",
]
