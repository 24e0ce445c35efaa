from __future__ import annotations

import os
from configparser import ConfigParser
from typing import TypeVar

from pydantic import BaseModel

T = TypeVar("T", bound=BaseModel)


def read_ini_sections(config_file: str) -> ConfigParser:
    """
    Parses an INI file, refusing paths that do not exist.

    ConfigParser silently ignores missing files, which would turn a typo in
    `--config_file` into a run with default settings.

    Args:
        config_file (str): The path to the INI configuration file.

    Returns:
        ConfigParser: The parsed file.

    Raises:
        FileNotFoundError: If the file does not exist.
    """
    if not os.path.exists(config_file):
        raise FileNotFoundError(f"Config file {config_file} does not exist.")
    parser = ConfigParser(inline_comment_prefixes=("#", ";"))
    parser.read(config_file, encoding="utf-8")
    return parser


def load_settings_from_ini_section(
    settings_class: type[T], config_file: str, section: str
) -> T:
    """
    Loads one section of an INI file into a Pydantic model.

    Values are handed over as strings and coerced by the model. Blank values
    are dropped so that the model default applies. A missing section yields
    the model with its defaults.

    Args:
        settings_class (type[T]): The Pydantic model class to populate.
        config_file (str): The path to the INI configuration file.
        section (str): The section in the INI file to load settings from.

    Returns:
        T: An instance of `settings_class`.
    """
    parser = read_ini_sections(config_file)

    if section not in parser:
        return settings_class()

    settings = {
        key: value for key, value in parser.items(section) if value.strip() != ""
    }
    return settings_class(**settings)
