from __future__ import annotations

import os
import unittest
from configparser import ConfigParser
from tempfile import NamedTemporaryFile

from pydantic import ValidationError

from config.loaders.ini_loader import load_settings_from_ini_section
from config.settings.fuzz_settings import FuzzSettings
from config.settings.solver_settings import SolverSettings


class TestIniLoader(unittest.TestCase):
    """Test class for the INI loader functionality."""

    def setUp(self) -> None:
        """Set up a temporary INI file for testing."""
        with NamedTemporaryFile(delete=False, mode="w", suffix=".ini") as temp_file:
            self.temp_ini_file_name = temp_file.name
            config_parser = ConfigParser()
            config_parser.add_section("solver")
            config_parser.set("solver", "path_cap", "500")
            config_parser.set("solver", "cross_check_chain_lp", "False")
            config_parser.set("solver", "uncross_budget_factor", "")
            config_parser.add_section("fuzz")
            config_parser.set("fuzz", "width", "4")
            config_parser.write(temp_file)

    def tearDown(self) -> None:
        """Clean up the temporary file after tests."""
        os.remove(self.temp_ini_file_name)

    def test_load_settings_from_valid_section(self):
        """Test loading settings from a valid section of the INI file."""
        loaded_settings = load_settings_from_ini_section(
            SolverSettings, self.temp_ini_file_name, "solver"
        )
        self.assertEqual(loaded_settings.path_cap, 500)
        self.assertFalse(loaded_settings.cross_check_chain_lp)
        self.assertTrue(loaded_settings.verify_outputs)

    def test_blank_value_keeps_default(self):
        """Test that an empty value falls back to the model default."""
        loaded_settings = load_settings_from_ini_section(
            SolverSettings, self.temp_ini_file_name, "solver"
        )
        self.assertEqual(loaded_settings.uncross_budget_factor, 8)

    def test_load_settings_from_invalid_section(self):
        """Test loading settings from a non-existent section."""
        loaded_settings = load_settings_from_ini_section(
            FuzzSettings, self.temp_ini_file_name, "NonExistent"
        )
        self.assertEqual(loaded_settings, FuzzSettings())

    def test_load_settings_with_type_mismatch(self):
        """Test loading settings with a type mismatch."""
        with open(self.temp_ini_file_name, "w", encoding="utf-8") as file:
            config_parser = ConfigParser()
            config_parser.add_section("solver")
            config_parser.set("solver", "path_cap", "not a number")
            config_parser.write(file)

        with self.assertRaises(ValidationError):
            load_settings_from_ini_section(
                SolverSettings, self.temp_ini_file_name, "solver"
            )

    def test_out_of_range(self):
        """Test that the fuzz ranges are enforced on load."""
        with open(self.temp_ini_file_name, "w", encoding="utf-8") as file:
            config_parser = ConfigParser()
            config_parser.add_section("fuzz")
            config_parser.set("fuzz", "width", "9")
            config_parser.write(file)

        with self.assertRaises(ValidationError):
            load_settings_from_ini_section(
                FuzzSettings, self.temp_ini_file_name, "fuzz"
            )

    def test_missing_file(self):
        """Test that a missing file is refused."""
        with self.assertRaises(FileNotFoundError):
            load_settings_from_ini_section(
                SolverSettings, "/nonexistent/planemf.ini", "solver"
            )


if __name__ == "__main__":
    unittest.main()
