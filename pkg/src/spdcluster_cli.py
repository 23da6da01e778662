"""
Command-line interface module for spdcluster.

Contains the SpdCluster CLI class and usage functions.
"""

import getopt
import os
import sys
import time

import numpy as np

from .spdcluster_config import get_config, set_config_value
from .spdcluster_dataset import load_dataset, load_partition, save_dataset, save_partition
from .spdcluster_diagnostics import SUITES
from .spdcluster_errors import ConfigError, SpdClusterError
from .spdcluster_evaluation import evaluate_partition
from .spdcluster_experiment import (
	ALGORITHMS,
	PRESETS,
	ExperimentConfig,
	RefStrategy,
	cluster_with,
	load_experiment_config,
	preset_config,
	run_experiment,
)
from .spdcluster_export import emit_results, write_json
from .spdcluster_helpers import derive_seed, format_duration, get_memory_usage, log_verbose, time_start
from .spdcluster_mean import MeanSolverConfig
from .spdcluster_partition import KMeansConfig
from .spdcluster_strings import text
from .spdcluster_synthgen import BallConfig, gen_ball_config, gen_mirror_config
from .spdcluster_tabledata import SummaryTableFormatter

LONG_OPTIONS = [
	'help', 'debug', 'verbose', 'seed=', 'generator=', 'k=', 'n=', 'samples=',
	'd-low=', 'd-up=', 'algorithm=', 'refs=', 'n-refs=', 't-close=', 't-far=',
	'eps-d=', 'n-rho=', 'repetitions=', 'format=', 'preset=', 'labels=',
]

INT_OPTIONS = {'--seed', '--k', '--n', '--samples', '--n-refs', '--n-rho', '--repetitions'}
FLOAT_OPTIONS = {'--d-low', '--d-up', '--t-close', '--t-far', '--eps-d'}


def usage():
	config = '\n'.join(f'  {key} = {value}' for key, value in get_config().to_dict().items())
	print(text('usage.text', presets=', '.join(sorted(PRESETS)), config=config))


def fatal(message):
	print(text('error.fatal', message=message))
	return 1


class SpdCluster:
	def __init__(self):
		self.opts = {}

	def _parse(self, args_orig):
		optlist, args = getopt.gnu_getopt(args_orig, 'hc:', LONG_OPTIONS)
		for o, v in optlist:
			if o == '-c':
				if '=' not in v:
					raise ConfigError(text('error.bad_config_format', value=v))
				key, value = v.split('=', 1)
				try:
					set_config_value(key, value)
				except ValueError as e:
					raise ConfigError(text('error.bad_config_value', key=key, value=value, error=e))
			elif o == '--debug':
				get_config().debug = True
				get_config().verbose = True  # Debug implies verbose
			elif o == '--verbose':
				get_config().verbose = True
			elif o in ('-h', '--help'):
				self.opts['help'] = True
			elif o in INT_OPTIONS or o in FLOAT_OPTIONS:
				try:
					self.opts[o[2:]] = int(v) if o in INT_OPTIONS else float(v)
				except ValueError:
					raise ConfigError(text('error.bad_option_value', option=o, value=v))
			else:
				self.opts[o[2:]] = v
		return args

	def run(self, args_orig):
		"""Run one command; returns the process exit code."""
		try:
			args = self._parse(args_orig)
		except getopt.GetoptError as e:
			usage()
			return fatal(str(e))
		except ConfigError as e:
			return fatal(str(e))
		if self.opts.get('help') or not args:
			usage()
			return 0

		command, rest = args[0], args[1:]
		handler = getattr(self, f'cmd_{command}', None)
		if handler is None:
			usage()
			return fatal(text('error.unknown_command', command=command))
		try:
			code = handler(rest)
		except SpdClusterError as e:
			if get_config().debug:
				import traceback
				traceback.print_exc()
			return fatal(str(e))
		log_verbose(text('status.execution_time', elapsed=format_duration(time.time() - time_start),
				memory=get_memory_usage()))
		return code

	# --- shared option handling ---------------------------------------------

	def _expect(self, command, rest, expected, counts):
		if len(rest) not in counts:
			raise ConfigError(text('error.wrong_arguments', command=command, expected=expected))

	def _seed(self):
		return self.opts.get('seed')

	def _algorithms(self):
		names = [a.strip().upper() for a in self.opts.get('algorithm', 'FMC2').split(',') if a.strip()]
		bad = [a for a in names if a not in ALGORITHMS]
		if bad or not names:
			raise ConfigError(text('error.bad_option_value', option='--algorithm', value=self.opts.get('algorithm')))
		return names

	def _ref_strategy(self):
		return RefStrategy(
			kind=self.opts.get('refs', 'principled'),
			n_refs=self.opts.get('n-refs'),
			t_close=self.opts.get('t-close', 5.0),
			t_far=self.opts.get('t-far', 0.35),
			eps_d=self.opts.get('eps-d', 2.5),
			n_rho=self.opts.get('n-rho', 50),
		)

	def _k(self, ds):
		if 'k' in self.opts:
			return self.opts['k']
		if ds.labels is not None:
			return ds.k
		raise ConfigError(text('error.k_required'))

	def _kmeans_cfg(self, k):
		seed = self._seed()
		return KMeansConfig.from_config(k, None if seed is None else derive_seed(seed, 2))

	def _load(self, path):
		return load_dataset(path, labels_path=self.opts.get('labels'))

	# --- commands -------------------------------------------------------------

	def cmd_generate(self, rest):
		self._expect('generate', rest, '<out.spd>', (1,))
		kind = self.opts.get('generator', 'ball')
		n = self.opts.get('n', 4)
		samples = self.opts.get('samples', 400)
		if kind == 'ball':
			ds = gen_ball_config(BallConfig(
				k=self.opts.get('k', 2), n=n, samples_per_ball=samples,
				d_low=self.opts.get('d-low', 1.1), d_up=self.opts.get('d-up', 3.0), seed=self._seed()))
		elif kind == 'mirror':
			ds = gen_mirror_config(n, samples_per_ball=samples, seed=self._seed())
		else:
			raise ConfigError(text('error.bad_option_value', option='--generator', value=kind))
		save_dataset(rest[0], ds.points, ds.labels, ds.provenance)
		print(text('status.generated', N=len(ds), n=ds.n, k=ds.k, path=rest[0]))
		return 0

	def _select_refs(self, ds, k):
		seed = self._seed()
		strategy = self._ref_strategy()
		return strategy.select(ds.points, k, None if seed is None else derive_seed(seed, 1), self._kmeans_cfg(k))

	def cmd_cluster(self, rest):
		self._expect('cluster', rest, '<dataset> <out.json>', (2,))
		ds = self._load(rest[0])
		k = self._k(ds)
		algorithm = self._algorithms()[0]
		refs, ref_report = None, None
		if algorithm.startswith('FMC'):
			refs, ref_report = self._select_refs(ds, k)
		part = cluster_with(algorithm, ds.points, self._kmeans_cfg(k), refs, MeanSolverConfig.from_config())
		extra = {'algorithm': algorithm, 'dataset': os.path.abspath(rest[0])}
		if ref_report is not None:
			extra['refs'] = ref_report
		save_partition(rest[1], part, extra)
		print(text('status.clustered', algorithm=algorithm, k=k, totdisp=part.totdisp,
				iterations=part.iterations, path=rest[1]))
		return 0

	def cmd_evaluate(self, rest):
		self._expect('evaluate', rest, '<dataset> <partition.json> [out.json]', (2, 3))
		ds = self._load(rest[0])
		part = load_partition(rest[1])
		report = evaluate_partition(ds.points, part.labels, part.k, ds.labels,
				runtime_seconds=part.metadata.get('timing'))
		accuracy = '-' if report.accuracy is None else f'{100.0 * report.accuracy:.2f}%'
		normalized = '-' if report.normalized_totdisp is None else f'{report.normalized_totdisp:.4f}'
		print(text('status.evaluated', accuracy=accuracy, totdisp=report.totdisp, normalized=normalized))
		if len(rest) == 3:
			write_json(rest[2], report.to_dict())
		return 0

	def cmd_refpoints(self, rest):
		self._expect('refpoints', rest, '<dataset> <out.json>', (2,))
		ds = self._load(rest[0])
		k = self._k(ds)
		refs, report = self._select_refs(ds, k)
		write_json(rest[1], {'refs': np.asarray(refs), 'report': report})
		print(text('status.refpoints', count=len(refs), strategy=report.get('strategy'), path=rest[1]))
		return 0

	def _bench_config(self, rest):
		overrides = {'seed': self._seed()}
		if 'repetitions' in self.opts:
			overrides['repetitions'] = self.opts['repetitions']
		if 'algorithm' in self.opts:
			overrides['algorithms'] = self._algorithms()
		if 'preset' in self.opts:
			cfg = preset_config(self.opts['preset'], **overrides)
			outdir = rest
		else:
			if not rest:
				raise ConfigError(text('error.no_experiment'))
			cfg = load_experiment_config(rest[0])
			cfg = ExperimentConfig.from_dict({**cfg.to_dict(), **overrides})
			outdir = rest[1:]
		gen = cfg.generator
		for option, attr in (('k', 'k'), ('n', 'n'), ('samples', 'samples_per_ball'),
				('d-low', 'd_low'), ('d-up', 'd_up')):
			if option in self.opts:
				setattr(gen, attr, self.opts[option])
		if 'generator' in self.opts:
			gen.kind = self.opts['generator']
			gen.__post_init__()
		for option, attr in (('refs', 'kind'), ('n-refs', 'n_refs'), ('t-close', 't_close'),
				('t-far', 't_far'), ('eps-d', 'eps_d'), ('n-rho', 'n_rho')):
			if option in self.opts:
				setattr(cfg.refs, attr, self.opts[option])
		cfg.refs.__post_init__()
		return cfg, outdir

	def cmd_bench(self, rest):
		if self._seed() is None:
			raise ConfigError(text('error.seed_required'))
		cfg, outdir = self._bench_config(rest)
		self._expect('bench', outdir, '(<experiment.json|yaml> | --preset NAME) <outdir>', (1,))
		fmt = self.opts.get('format', 'csv')
		print(text('status.bench_start', name=cfg.name, repetitions=cfg.repetitions,
				algorithms=', '.join(cfg.algorithms)))
		start = time.time()
		result = run_experiment(cfg)
		paths = emit_results(result, fmt, outdir[0], basename=cfg.name)
		print(SummaryTableFormatter().format_summary(result.summary, cfg.generator.k, cfg.refs.n_refs))
		print(text('status.bench_done', rows=len(result.rows), failed=len(result.failed),
				elapsed=format_duration(time.time() - start), paths=', '.join(paths)))
		return 0

	def cmd_diagnose(self, rest):
		self._expect('diagnose', rest, '(euclid|spd) <out.json>', (2,))
		suite = SUITES.get(rest[0])
		if suite is None:
			raise ConfigError(text('error.unknown_suite', suite=rest[0]))
		seed = self._seed()
		report = suite(0 if seed is None else seed)
		write_json(rest[1], report)
		print(text('status.diagnose_done', suite=rest[0], result='passed' if report['passed'] else 'FAILED',
				path=rest[1]))
		return 0 if report['passed'] else 1


def main(argv=None):
	argv = sys.argv[1:] if argv is None else argv
	try:
		code = SpdCluster().run(argv)
	except KeyboardInterrupt:
		print('\n' + text('error.interrupted'))
		code = 1
	except KeyError as e:
		code = fatal(text('error.configuration', error=e))
	except Exception as e:
		code = fatal(text('error.unexpected', error=e))
		if get_config().debug:
			import traceback
			traceback.print_exc()
	sys.exit(code)
