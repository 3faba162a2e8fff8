class Color:
    """ANSI colouring for console messages and CLI help text"""

    FOREGROUND = {
        'red': '31m',
        'green': '32m',
        'yellow': '33m',
        'blue': '34m',
        'magenta': '35m',
        'cyan': '36m',
        'white': '37m',
    }
    FORMATTING = {
        'reset': '00m',
        'default': '10m',
        'bold': '01m',
        'italic': '03m',
    }
    ESC = '\033['

    @property
    def reset(self) -> str:
        return f'{self.ESC}{self.FORMATTING["reset"]}'

    def format_message(self, msg: str, color: str, _format: str = 'default') -> str:
        """Format message with color and formatting. Unknown color or format names fall back to plain text

        Args:
            msg (str): message to format
            color (str): foreground color name
            _format (str, optional): formatting option. Defaults to 'default'.

        Returns:
            str: formatted message
        """
        code = self.FOREGROUND.get(color)
        style = self.FORMATTING.get(_format)
        if code is None or style is None:
            return msg
        return f'{self.ESC}{code}{self.ESC}{style}{msg}{self.reset}'

    def print_message(self, msg: str, color: str, _format: str = 'default'):
        print(self.format_message(msg, color, _format))

    def print_table(self, rows: list, header: list, color: str = 'cyan'):
        """Print a small fixed-width table, header in bold

        Args:
            rows (list): list of row sequences
            header (list): column names
            color (str, optional): table color. Defaults to 'cyan'.
        """
        cells = [[str(cell) for cell in header]] + [[self.__cell(cell) for cell in row] for row in rows]
        widths = [max(len(row[i]) for row in cells) for i in range(len(header))]
        lines = ['  '.join(cell.ljust(width) for cell, width in zip(row, widths)) for row in cells]
        self.print_message(lines[0], color, 'bold')
        for line in lines[1:]:
            self.print_message(line, color)

    @staticmethod
    def __cell(value) -> str:
        if isinstance(value, float):
            return f'{value:.4g}'
        return str(value)
