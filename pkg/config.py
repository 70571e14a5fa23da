from pydantic_settings import BaseSettings
from pydantic import Field
from typing import Literal

class Settings(BaseSettings):
    """Numerical and search configuration settings"""

    # Tolerance Configuration
    rank_rel: float = Field(default=1e-8, description="Relative singular value cutoff for numerical rank")
    psd_abs: float = Field(default=1e-8, description="Absolute eigenvalue slack for PSD tests")
    subspace_angle: float = Field(default=1e-8, description="Largest principal angle accepted as subspace equality")
    membership_tol: float = Field(default=1e-8, description="Projection residual accepted as subspace membership")
    block_zero_rel: float = Field(default=1e-7, description="Relative norm below which a Gram block counts as zero")

    # Search Configuration
    default_seed: int = Field(default=0, description="Seed of the first randomized start")
    search_budget: int = Field(default=400, description="Iterations per randomized start")
    search_starts: int = Field(default=8, description="Number of randomized starts per search")
    effort: Literal["quick", "full"] = Field(default="quick", description="Report effort level")

    # Size Limits
    max_kraus: int = Field(default=4096, description="Largest Kraus family a construction may produce")
    max_search_kraus: int = Field(default=12, description="Cap on Kraus operators in channel searches")

    # SDP Solver Configuration
    sdp_max_iterations: int = Field(default=200, description="Interior-point iteration limit")
    sdp_gap_tol: float = Field(default=1e-7, description="Relative duality gap target")

    # Logging Configuration
    log_level: str = Field(default="INFO", description="Root log level for the command-line tool")

    class Config:
        env_file = ".env"
        env_prefix = "NCGRAPH_"
        case_sensitive = False

def get_settings() -> Settings:
    """Get application settings"""
    return Settings()
