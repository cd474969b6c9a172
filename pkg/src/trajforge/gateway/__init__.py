"""Provider abstraction over chat-completion services."""

from .provider import (
    DEFAULT_KEY_ENV,
    CallRecord,
    ChatRequest,
    HttpChatProvider,
    ProviderConfig,
    ScriptEntry,
    ScriptedProvider,
    build_provider,
    load_script,
)

__all__ = [
    "DEFAULT_KEY_ENV",
    "CallRecord",
    "ChatRequest",
    "HttpChatProvider",
    "ProviderConfig",
    "ScriptEntry",
    "ScriptedProvider",
    "build_provider",
    "load_script",
]
