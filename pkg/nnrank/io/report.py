import typing

from dataclasses import dataclass, field

from nnrank.version import __version__


@dataclass
class RunReport:
    """Machine-parseable `key: value` summary of a CLI run.

    Attributes
    ----------
    command : str
        Subcommand name
    inputs : Dict[str, str]
        Input files and flags the run depends on
    outcome : str
        Verdict or status of the run
    timings : Dict[str, float]
        Named wall-clock durations in seconds
    bit_lengths : Dict[str, int]
        Maximum bit size of numerators and denominators per input/output matrix
    details : Dict[str, str]
        Command specific extra lines
    """
    command: str
    inputs: typing.Dict[str, str] = field(default_factory=dict)
    outcome: str = ""
    timings: typing.Dict[str, float] = field(default_factory=dict)
    bit_lengths: typing.Dict[str, int] = field(default_factory=dict)
    details: typing.Dict[str, str] = field(default_factory=dict)

    def lines(self) -> typing.List[str]:
        lines = [f"command: {self.command}", f"version: {__version__}"]
        lines += [f"input.{key}: {value}" for key, value in self.inputs.items()]
        lines.append(f"outcome: {self.outcome}")
        lines += [f"time.{key}: {value:.3f}" for key, value in self.timings.items()]
        lines += [f"bits.{key}: {value}" for key, value in self.bit_lengths.items()]
        lines += [f"{key}: {value}" for key, value in self.details.items()]
        return lines

    def render(self) -> str:
        return "\n".join(self.lines()) + "\n"

    def save(self, path: str):
        with open(path, "w") as file:
            file.write(self.render())


def parse_report(text: str) -> typing.Dict[str, str]:
    result = {}
    for line in text.splitlines():
        if ": " in line:
            key, value = line.split(": ", 1)
            result[key] = value
    return result
