"""
Controller factory for creating per-run controllers.
"""

import structlog

from app.config.app_config import AppConfig
from app.controllers.base_controller import BaseController
from app.controllers.registry import ControllerRegistry
from app.errors import ConfigError

logger = structlog.get_logger(__name__)


def create_controller(mode: str, config: AppConfig) -> BaseController:
    """Create the controller for a decision mode."""
    definition = ControllerRegistry.find(mode)
    if definition is None:
        known = [d.name for d in ControllerRegistry.get_all_controllers()]
        raise ConfigError(f"unknown mode {mode!r}; expected one of {known}")
    logger.debug("Creating controller", mode=mode, display_name=definition.display_name)
    return definition.controller_class(config)
