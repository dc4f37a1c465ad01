import os


class Config:
    """Default configuration values for the Nerve Scout command line."""

    BUDGET: int
    MAX_DIM: int
    MAX_WORKERS: int
    LOG_LEVEL: str

    @classmethod
    def load(cls) -> None:
        """Read the settings from the environment; call again after loading a .env file."""

        cls.BUDGET = int(os.getenv("NERVESCOUT_BUDGET", "1000000"))
        cls.MAX_DIM = int(os.getenv("NERVESCOUT_MAX_DIM", "3"))
        cls.MAX_WORKERS = int(os.getenv("NERVESCOUT_MAX_WORKERS", "4"))
        cls.LOG_LEVEL = os.getenv("NERVESCOUT_LOG_LEVEL", "WARNING")


Config.load()
