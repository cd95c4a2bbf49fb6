"""
ecslab command line
Batch validation, curvature verification and Olszak rank analysis of Roter cases
"""

import logging
import sys
from pathlib import Path
from typing import Optional

import click

from .case_config import ConfigParseError, load_cases
from .config import CONFIG, get_env_config
from .verification_pipeline import create_verification_pipeline, exit_code, render_report, summarize

logger = logging.getLogger(__name__)


def setup_logging(quiet: bool = False):
    """Console logging on stderr, plus a log file when ECSLAB_LOG_FILE is set"""
    env = get_env_config()
    logging_config = CONFIG['logging']
    level = logging.WARNING if quiet else getattr(logging, env['LOG_LEVEL'].upper(), logging.INFO)
    handlers = [logging.StreamHandler(sys.stderr)]
    if env['LOG_FILE'] or logging_config['file_handler']:
        handlers.append(logging.FileHandler(env['LOG_FILE'] or 'ecslab.log'))
    logging.basicConfig(level=level, format=logging_config['format'], handlers=handlers, force=True)


def _run_command(command: str, config_path: str, report_path: Optional[str],
                 points_path: Optional[str], quiet: bool):
    setup_logging(quiet)
    ctx = click.get_current_context()

    try:
        config_text = Path(config_path).read_text(encoding='utf-8')
        points_text = Path(points_path).read_text(encoding='utf-8') if points_path else None
        cases = load_cases(config_text, points_text)
    except (ConfigParseError, UnicodeDecodeError, OSError) as e:
        click.echo(f"Parse error: {e}", err=True)
        ctx.exit(1)

    pipeline = create_verification_pipeline(CONFIG, show_progress=not quiet and CONFIG['sweep']['show_progress'])
    reports = pipeline.run_many(cases, command)
    text = render_report(reports)

    if report_path:
        Path(report_path).write_text(text, encoding='utf-8')
        logger.info(f"Report written to {report_path}")
    else:
        click.echo(text, nl=False)

    if not quiet:
        for report in reports:
            click.echo(f"{report.case_id}: {report.overall.value}", err=True)
        summary = summarize(reports)
        click.echo(f"pass={summary['pass']} fail={summary['fail']} warn={summary['warn']}", err=True)

    ctx.exit(exit_code(reports))


def common_options(func):
    func = click.option('--quiet', is_flag=True, help='Only log warnings and errors')(func)
    func = click.option('--points', 'points_path', type=click.Path(exists=True, dir_okay=False),
                        help='YAML/JSON file with `points: [[...]]` overriding sample points')(func)
    func = click.option('--report', 'report_path', type=click.Path(dir_okay=False),
                        help='Write the JSON report here instead of stdout')(func)
    func = click.option('-c', '--config', 'config_path', required=True,
                        type=click.Path(exists=True, dir_okay=False), help='Case file')(func)
    return func


@click.group()
def cli():
    """Exact curvature and Olszak rank checks for Roter metrics"""


@cli.command()
@common_options
def validate(config_path, report_path, points_path, quiet):
    """Check Roter parameter constraints only"""
    _run_command('validate', config_path, report_path, points_path, quiet)


@cli.command()
@common_options
def verify(config_path, report_path, points_path, quiet):
    """Closed-form agreement, curvature identities and parallel Weyl"""
    _run_command('verify', config_path, report_path, points_path, quiet)


@cli.command()
@common_options
def rank(config_path, report_path, points_path, quiet):
    """Olszak rank d at every sample point against the rank-A prediction"""
    _run_command('rank', config_path, report_path, points_path, quiet)


@cli.command()
@common_options
def sweep(config_path, report_path, points_path, quiet):
    """verify and rank for every case"""
    _run_command('sweep', config_path, report_path, points_path, quiet)


def main():
    cli(prog_name='ecslab')


if __name__ == "__main__":
    main()
