"""
Configuration settings for the finite-field simplex census toolkit.
"""
import logging
import os

from dotenv import load_dotenv

# Load environment variables from .env file
load_dotenv()

logger = logging.getLogger(__name__)


def _flag(name: str, default: str) -> bool:
    return os.getenv(name, default).lower() == "true"


class Settings:
    """Toolkit settings loaded from environment variables."""

    # Logging and output
    LOG_LEVEL: str = os.getenv("FFS_LOG_LEVEL", "INFO")
    RESULTS_PATH: str = os.getenv("FFS_RESULTS_PATH", "./results/")

    # Parallelism and randomness
    THREADS: int = int(os.getenv("FFS_THREADS", "1"))
    SEED: int = int(os.getenv("FFS_SEED", "0"))

    # Graph caps
    ER_VERTEX_CAP: int = int(os.getenv("FFS_ER_VERTEX_CAP", "10000"))
    DENSE_SOLVER_CAP: int = int(os.getenv("FFS_DENSE_SOLVER_CAP", "5000"))
    REFLECTION_Q_CAP: int = int(os.getenv("FFS_REFLECTION_Q_CAP", "13"))

    # Counting caps
    CENSUS_TUPLE_CAP: int = int(os.getenv("FFS_CENSUS_TUPLE_CAP", "100000000"))
    MOTION_SWEEP_CAP: int = int(os.getenv("FFS_MOTION_SWEEP_CAP", "20000000"))
    ORTHOGONAL_Q_CAP_N3: int = int(os.getenv("FFS_ORTHOGONAL_Q_CAP_N3", "13"))
    ALLOW_N4: bool = _flag("FFS_ALLOW_N4", "false")
    DDS_POINT_CAP: int = int(os.getenv("FFS_DDS_POINT_CAP", "120"))
    HINGE_CROSSCHECK_CAP: int = int(os.getenv("FFS_HINGE_CROSSCHECK_CAP", "1000000"))
    SPENCER_ROUND_LIMIT: int = int(os.getenv("FFS_SPENCER_ROUND_LIMIT", "64"))

    # Constant standing in for the implicit constant of the planar bounds
    PLANAR_CONSTANT: int = int(os.getenv("FFS_PLANAR_CONSTANT", "4"))

    # Floating-point tolerances (eigenvalues only)
    EIGEN_TOL: float = float(os.getenv("FFS_EIGEN_TOL", "1e-8"))
    COMPARE_TOL: float = float(os.getenv("FFS_COMPARE_TOL", "1e-6"))

    @classmethod
    def as_dict(cls) -> dict:
        return {
            name.lower(): getattr(cls, name)
            for name in dir(cls)
            if name.isupper()
        }

    @classmethod
    def validate(cls) -> bool:
        """Validate that caps and tolerances are positive."""
        bad_keys = [
            name for name, value in cls.as_dict().items()
            if isinstance(value, (int, float)) and not isinstance(value, bool)
            and value <= 0 and name != "seed"
        ]
        if cls.SEED < 0:
            bad_keys.append("seed")

        if bad_keys:
            logger.error("Non-positive settings: %s", sorted(bad_keys))
            return False
        return True


# Global settings instance
settings = Settings()
