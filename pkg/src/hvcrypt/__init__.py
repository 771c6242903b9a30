"""Expansionless and hierarchical visual cryptography for binary images."""
from importlib import resources

from .bitmap import BinaryImage, load_pbm, save_pbm, normalize_size, block_at
from .codec import BlockClass, classify_block, pattern_pair, choose_index, stack
from .vc2 import EncodeConfig, SharePair, encode, reveal, is_pure_block_image
from .hvc import (HierarchyBundle, KeyMapping, encode_hierarchical, generate_key_share,
                  reveal_final, reveal_chain, blacker_tendency)
from .analysis import pixel_stats, report, chi_square_uniformity, write_csv

__version__ = "0.1.0"


def sample_secret() -> BinaryImage:
    """Bundled 99x92 rendered-text secret."""
    with resources.files(__package__).joinpath("data/secret.pbm").open("rb") as fh:
        from .bitmap import parse_pbm
        return parse_pbm(fh.read())


def sample_secret_path():
    return resources.files(__package__).joinpath("data/secret.pbm")
