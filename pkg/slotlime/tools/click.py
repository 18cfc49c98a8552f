from typing import Any, Callable, List, Optional, Sequence

import click


class ClickTools:
    @classmethod
    def _split(cls, value: Any) -> List[str]:
        if isinstance(value, (list, tuple)):
            return [str(v) for v in value]
        return [x.strip() for x in str(value).strip("[]()").split(",") if x.strip()]

    @classmethod
    def parse_float_list(
        cls, ctx: click.Context, param: click.Parameter, value: Optional[Any]
    ) -> Optional[List[float]]:
        """click callback turning ``0.6,0.4`` into ``[0.6, 0.4]``.

        Raises:
            click.BadParameter: on an empty list or a non numeric entry
        """
        if value is None:
            return None
        items = cls._split(value)
        if not items:
            raise click.BadParameter("the list is empty")
        try:
            return [float(x) for x in items]
        except ValueError as e:
            raise click.BadParameter(str(e))

    @classmethod
    def parse_int_list(
        cls, ctx: click.Context, param: click.Parameter, value: Optional[Any]
    ) -> Optional[List[int]]:
        if value is None:
            return None
        items = cls._split(value)
        if not items:
            raise click.BadParameter("the list is empty")
        try:
            return [int(x) for x in items]
        except ValueError as e:
            raise click.BadParameter(str(e))

    @classmethod
    def load_config(cls, ctx: click.Context, param: click.Parameter, value: Optional[str]):
        """Eager callback filling ``ctx.default_map`` from a YAML/JSON file, so options
        given on the command line take precedence over the file."""
        if not value or ctx.resilient_parsing:
            return
        from choixe.configurations import XConfig

        cfg = XConfig(filename=value).to_dict()
        aliases = {}
        command = getattr(ctx, "command", None)
        for param in getattr(command, "params", []):
            for opt in getattr(param, "opts", []):
                aliases[opt.lstrip("-").replace("-", "_")] = param.name

        defaults = dict(ctx.default_map or {})
        for key, item in cfg.items():
            if isinstance(item, (list, tuple)):
                item = ",".join(str(x) for x in item)
            key = str(key).replace("-", "_")
            defaults[aliases.get(key, key)] = item
        ctx.default_map = defaults

    @classmethod
    def apply_options(cls, options: Sequence[Callable]) -> Callable:
        """Decorator applying a list of click options in the given order."""

        def decorator(func: Callable) -> Callable:
            for option in reversed(options):
                func = option(func)
            return func

        return decorator
