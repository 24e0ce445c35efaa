from __future__ import annotations

import logging
import os

from config.loaders.ini_loader import load_settings_from_ini_section
from config.settings.fuzz_settings import FuzzSettings
from config.settings.logging_settings import LoggingSettings
from config.settings.oracle_settings import OracleSettings
from config.settings.solver_settings import SolverSettings

DEFAULT_CONFIG_FILE = "planemf.ini"


class AppConfig:
    """
    Application configuration manager.

    Bundles the solver, oracle, logging and fuzz settings. Each settings
    object is a Pydantic model, so values come from an INI file section when
    one is loaded and from `PLANEMF_*` environment variables otherwise.
    """

    def __init__(self):
        """Initialize AppConfig with default settings."""
        self.solver_settings = SolverSettings()
        self.oracle_settings = OracleSettings()
        self.logging_settings = LoggingSettings()
        self.fuzz_settings = FuzzSettings()

    @property
    def path_cap(self) -> int:
        return self.solver_settings.path_cap

    @property
    def log_level(self) -> int:
        """Numeric logging level for `logging.basicConfig`."""
        level = logging.getLevelName(self.logging_settings.level.upper())
        if not isinstance(level, int):
            raise ValueError(f"Unknown log level {self.logging_settings.level}")
        return level

    def load_config_from_file(self, config_file: str) -> None:
        """Load configuration from a given file path."""
        self.solver_settings = load_settings_from_ini_section(
            SolverSettings, config_file, "solver"
        )
        self.oracle_settings = load_settings_from_ini_section(
            OracleSettings, config_file, "oracle"
        )
        self.logging_settings = load_settings_from_ini_section(
            LoggingSettings, config_file, "logging"
        )
        self.fuzz_settings = load_settings_from_ini_section(
            FuzzSettings, config_file, "fuzz"
        )
        logging.info("Configuration loaded from file %s", config_file)

    def _validate_config(self) -> None:
        """Validate that the numeric limits are usable."""
        if self.solver_settings.path_cap < 1:
            raise ValueError("path_cap must be positive")
        if self.solver_settings.uncross_budget_factor < 1:
            raise ValueError("uncross_budget_factor must be positive")
        if self.oracle_settings.max_supply_edges < 0:
            raise ValueError("max_supply_edges must not be negative")
        if self.oracle_settings.max_capacity_sum < 0:
            raise ValueError("max_capacity_sum must not be negative")
        if self.oracle_settings.max_paths < 0:
            raise ValueError("max_paths must not be negative")
        level = logging.getLevelName(self.logging_settings.level.upper())
        if not isinstance(level, int):
            raise ValueError(f"Unknown log level {self.logging_settings.level}")

    def load_config(self, config_file: (str | None) = None) -> None:
        """Load configuration from a given file, `planemf.ini`, or the environment."""
        if config_file:
            if os.path.exists(config_file):
                self.load_config_from_file(config_file)
            else:
                raise FileNotFoundError(f"Config file {config_file} does not exist.")
        elif os.path.exists(DEFAULT_CONFIG_FILE):
            self.load_config_from_file(DEFAULT_CONFIG_FILE)

        self._validate_config()

    def get_readable_config(self) -> str:
        """
        Retrieves a human-readable string of the current configuration.

        Returns:
            str: One `name: value` line per setting.
        """
        return (
            f"Path Cap: {self.solver_settings.path_cap}\n"
            f"Uncross Budget Factor: {self.solver_settings.uncross_budget_factor}\n"
            f"Chain LP Cross Check: "
            f"{'Yes' if self.solver_settings.cross_check_chain_lp else 'No'}\n"
            f"Verify Outputs: {'Yes' if self.solver_settings.verify_outputs else 'No'}\n"
            f"Oracle Max Supply Edges: {self.oracle_settings.max_supply_edges}\n"
            f"Oracle Max Capacity Sum: {self.oracle_settings.max_capacity_sum}\n"
            f"Oracle Max Paths: {self.oracle_settings.max_paths}\n"
            f"Log Level: {self.logging_settings.level}\n"
            f"Fuzz Grid: {self.fuzz_settings.width}x{self.fuzz_settings.height}, "
            f"{self.fuzz_settings.demands} demands"
        )
