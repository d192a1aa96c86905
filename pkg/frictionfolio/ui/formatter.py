from logging import Formatter, ERROR, DEBUG, INFO, WARN


class FrictionfolioFormatter(Formatter):
    FORMATS = {ERROR: "ERROR: %(message)s",
               DEBUG: "- %(message)s",
               INFO: "%(message)s",
               WARN: "! %(message)s"}

    def format(self, record):
        self._style._fmt = self.FORMATS.get(record.levelno, self.FORMATS[INFO])
        return super(FrictionfolioFormatter, self).format(record)
