from argparse import ArgumentParser, HelpFormatter

from natscc.color import Color
from natscc.errors import ConfigError


class CustomHelpFormatter(HelpFormatter):
    """Help formatter printing each option in color with a blank line after it"""
    def __init__(self, prog, indent_increment=2, max_help_position=28, width=120, color='cyan'):
        super().__init__(prog, indent_increment, max_help_position, width)
        self.color = color

    def _format_action(self, action):
        return Color().format_message(f'{super()._format_action(action)}\n', self.color, _format='italic')


class ArgParser(ArgumentParser):
    """argparse parser declared from a dict of argument name -> add_argument kwargs.

    Two extra keys are understood: 'short' gives the one-letter flag and 'positional' declares a positional argument.
    Underscores in names become hyphens in the long flag ('damage_fn' -> '--damage-fn') and stay underscores in the
    parsed dict.
    """
    def __init__(self, description='Arg Parser', parent_args: list = None, create_arguments: dict = None,
                 help_color='yellow', prog: str = None):
        """
        Args:
            description (str): help description. Defaults to 'Arg Parser'
            parent_args (list, optional): argv forwarded by the natscc parent command, sys.argv when None.
                Defaults to None.
            create_arguments (dict, optional): argument declarations. Defaults to {}.
            help_color (str, optional): color of the help header. Defaults to 'yellow'.
            prog (str, optional): program name in the usage line. Defaults to None.
        """
        super().__init__(formatter_class=CustomHelpFormatter, description=description, prog=prog)
        self.args = {}
        self.parent_args = parent_args
        self.create_arguments = create_arguments or {}
        self.help_color = help_color

    def format_help(self):
        return Color().format_message(super().format_help(), self.help_color)

    def set_arguments(self) -> dict:
        """Declare every argument, then parse parent_args (or sys.argv)

        Raises:
            ConfigError: an invalid declaration

        Returns:
            dict: parsed arguments by name
        """
        for arg_name, arg_values in self.create_arguments.items():
            arg_values = dict(arg_values)
            short_name = self.__short_flag(arg_values.pop('short', ''))
            if arg_values.pop('positional', False):
                self.__add(None, arg_name.lstrip('-').replace('-', '_'), arg_values)
            else:
                self.__add(short_name, self.__long_flag(arg_name), arg_values)
        args = self.parse_args(self.parent_args) if self.parent_args is not None else self.parse_args()
        self.args = vars(args)
        return self.args

    @staticmethod
    def __long_flag(arg_name: str) -> str:
        arg_name = arg_name.replace(' ', '-').replace('_', '-')
        return arg_name if arg_name.startswith('--') else f'--{arg_name.lstrip("-")}'

    @staticmethod
    def __short_flag(short_name) -> str:
        short_name = str(short_name or '')
        return f'-{short_name.lstrip("-")}' if short_name else None

    def __add(self, short_name: str, arg_name: str, arg_values: dict):
        flags = [short_name, arg_name] if short_name else [arg_name]
        try:
            self.add_argument(*flags, **arg_values)
        except (TypeError, ValueError) as error:
            raise ConfigError(f'Failed to add argument {arg_name}: {error}') from error
