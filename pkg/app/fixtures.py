"""Bundled synthetic screen used by the self-test: a procedurally drawn login screen."""
import logging
from typing import Optional, Sequence

import numpy as np

from app.model import (
    BoundingBox,
    ComponentType,
    GuiComponent,
    Origin,
    RGB,
    ScreenHierarchy,
    ScreenImage,
    ScreenPair,
    validate_pair,
)
from app.utils.render import render_text_block

logger = logging.getLogger(__name__)

SCREEN_W, SCREEN_H = 360, 640

WHITE: RGB = (255, 255, 255)
INK: RGB = (17, 24, 39)
MUTED: RGB = (107, 114, 128)
BRAND: RGB = (33, 99, 235)
LINK: RGB = (29, 78, 216)
FIELD: RGB = (243, 244, 246)
LOGO_BG: RGB = (241, 245, 249)
BORDER: RGB = (156, 163, 175)
ACCENT: RGB = (249, 115, 22)

FIXTURE_SOURCE = "fixture:login"


def _leaf(cid: str, ctype: ComponentType, x: int, y: int, w: int, h: int, text: Optional[str] = None):
    return GuiComponent(id=cid, ctype=ctype, bounds=BoundingBox.of(x, y, w, h), text=text)


def _container(cid: str, x: int, y: int, w: int, h: int, children: Sequence[GuiComponent]):
    return GuiComponent(
        id=cid, ctype=ComponentType.CONTAINER, bounds=BoundingBox.of(x, y, w, h), children=tuple(children)
    )


def _fill(pixels: np.ndarray, x: int, y: int, w: int, h: int, color: RGB) -> None:
    pixels[y : y + h, x : x + w] = color


def login_hierarchy() -> ScreenHierarchy:
    header = _container(
        "header",
        0, 0, SCREEN_W, 56,
        [
            _leaf("menu_icon", ComponentType.IMAGE, 16, 16, 24, 24),
            _leaf("title", ComponentType.TEXT, 56, 14, 200, 28, "Sign in"),
        ],
    )
    form = _container(
        "form",
        24, 290, 312, 200,
        [
            _leaf("email_label", ComponentType.TEXT, 40, 296, 120, 18, "Email"),
            _leaf("email_input", ComponentType.INPUT, 40, 318, 280, 40, "name@example.com"),
            _leaf("password_label", ComponentType.TEXT, 40, 370, 120, 18, "Password"),
            _leaf("password_input", ComponentType.INPUT, 40, 392, 280, 40, "Enter password"),
            _leaf("remember_box", ComponentType.OTHER, 40, 446, 20, 20),
            _leaf("remember_label", ComponentType.TEXT, 68, 446, 140, 20, "Remember me"),
        ],
    )
    root = _container(
        "root",
        0, 0, SCREEN_W, SCREEN_H,
        [
            header,
            _leaf("logo", ComponentType.IMAGE, 130, 88, 100, 100),
            _leaf("welcome", ComponentType.TEXT, 40, 212, 280, 32, "Welcome back"),
            _leaf("subtitle", ComponentType.TEXT, 40, 248, 280, 20, "Log in to continue"),
            form,
            _leaf("login_button", ComponentType.BUTTON, 40, 500, 280, 48, "Log in"),
            _leaf("forgot_link", ComponentType.TEXT, 40, 560, 160, 20, "Forgot password?"),
            _leaf("signup_link", ComponentType.TEXT, 220, 560, 100, 20, "Sign up"),
            _leaf("brand_mark", ComponentType.IMAGE, 164, 596, 32, 32),
        ],
    )
    return ScreenHierarchy(screen_w=SCREEN_W, screen_h=SCREEN_H, root=root)


def _draw(hierarchy: ScreenHierarchy) -> ScreenImage:
    pixels = np.empty((SCREEN_H, SCREEN_W, 3), dtype=np.uint8)
    pixels[:, :] = WHITE
    _fill(pixels, 0, 0, SCREEN_W, 56, BRAND)

    # menu: three white bars on the header color
    for bar_y in (20, 26, 32):
        _fill(pixels, 16, bar_y, 24, 3, WHITE)
    # logo: light tile with a centered brand square
    _fill(pixels, 130, 88, 100, 100, LOGO_BG)
    _fill(pixels, 150, 108, 60, 60, BRAND)
    # checkbox: 2 px border around a white square
    _fill(pixels, 40, 446, 20, 20, BORDER)
    _fill(pixels, 42, 448, 16, 16, WHITE)
    # brand mark: orange tile with a white center
    _fill(pixels, 164, 596, 32, 32, ACCENT)
    _fill(pixels, 174, 606, 12, 12, WHITE)

    styles = {
        "title": (WHITE, BRAND),
        "welcome": (INK, WHITE),
        "subtitle": (MUTED, WHITE),
        "email_label": (INK, WHITE),
        "email_input": (MUTED, FIELD),
        "password_label": (INK, WHITE),
        "password_input": (MUTED, FIELD),
        "remember_label": (INK, WHITE),
        "login_button": (WHITE, BRAND),
        "forgot_link": (LINK, WHITE),
        "signup_link": (LINK, WHITE),
    }
    for component in hierarchy.iter_components():
        if component.id in styles:
            fg, bg = styles[component.id]
            render_text_block(pixels, component.bounds, component.text, fg, bg)
    return ScreenImage.from_array(pixels)


def build_login_screen(origin: Origin = Origin.MOCKUP) -> ScreenPair:
    """The clean login screen, identical on every call."""
    hierarchy = login_hierarchy()
    pair = validate_pair(hierarchy, _draw(hierarchy), origin, source=FIXTURE_SOURCE)
    logger.debug(f"Built fixture screen with {hierarchy.node_count} components")
    return pair
