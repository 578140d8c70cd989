"""
Decorators and utilities for the chatelet CLI
"""

import functools
import logging
import sys
from pathlib import Path
from typing import Callable, Optional

from errors import ChateletError, c_EXIT_UNEXPECTED
from ui_utils import LoadingIndicator, UIUtils

logger = logging.getLogger(__name__)


def handle_chatelet_errors(operation_name: str = "operation", ui: Optional[UIUtils] = None):
    """Decorator turning library errors into a message on stderr and an exit code"""

    def decorator(func: Callable[..., int]) -> Callable[..., int]:
        @functools.wraps(func)
        def wrapper(*args, **kwargs) -> int:
            console = ui or UIUtils()
            try:
                return func(*args, **kwargs)
            except ChateletError as e:
                print(console.error(f"{type(e).__name__} during {operation_name}: {e}"), file=sys.stderr)
                return e.exit_code
            except Exception as e:
                logger.debug("unexpected failure in %s", operation_name, exc_info=True)
                print(console.error(f"Unexpected error during {operation_name}: {e}"), file=sys.stderr)
                return c_EXIT_UNEXPECTED

        return wrapper

    return decorator


class PathManager:
    """Centralized path management for chatelet"""

    BASE_DIR = Path.home() / ".chatelet"

    @classmethod
    def get_config_file(cls) -> Path:
        """Get the config file path (not created until saved)"""
        return cls.BASE_DIR / "config.json"

    @classmethod
    def get_digest_file(cls, certificate_path: Path) -> Path:
        """Get the detached digest path written next to a certificate"""
        return certificate_path.with_name(certificate_path.name + ".sha256")


def with_loading_indicator(message: str = "Processing", ui: Optional[UIUtils] = None):
    """Decorator to show loading indicator during function execution"""

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args, **kwargs):
            if ui and ui.interactive:
                indicator = LoadingIndicator(message, ui)
                indicator.start()
                try:
                    return func(*args, **kwargs)
                finally:
                    indicator.stop()
            return func(*args, **kwargs)

        return wrapper

    return decorator
