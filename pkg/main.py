# main.py

# 🚀 Анализ операторов Ганкеля и понижение порядка LTI-систем 🚀
#
# Этот скрипт является главным центром управления пакетом. Он читает систему из JSON-файла,
# вычисляет сингулярные числа Ганкеля, n-поперечники и активные подпространства, строит
# модели пониженного порядка, выполняет развертку по параметрам и запускает проверку всех
# инвариантов на корпусе систем. Результаты печатаются в stdout (JSON или CSV), журнал
# пишется в stderr, текстовые отчеты по желанию сохраняются в папку 'reports'.
#
# Функционал:
# - Главная "панель управления" со значениями по умолчанию для всех команд.
# - hsv: сингулярные числа Ганкеля системы.
# - nwidth / active: n-поперечник образа шара и активное подпространство входов.
# - reduce: сбалансированное усечение (bt) или оптимальная аппроксимация по норме Ганкеля (ohna).
# - sweep: sigma_i по сетке параметров и нижняя граница max_p sigma_{n+1}(p).
# - generate: тестовая система из генераторов папки 'models'.
# - verify: все наборы проверок из папки 'checks', машиночитаемый отчет.
# - Коды выхода: 0 успех, 1 проверки не пройдены, 2 предметная ошибка, 3 ошибка ввода, 4 численная ошибка,
#   5 некорректная командная строка.
#
# Версия: 1.0
#
# Пример запуска:
#     python main.py hsv --system data/systems/two_state.json --format csv
#

# --- Системные и стандартные библиотеки ---
import argparse
import json
import logging
import os
import sys

# --- Импорты из нашего проекта ---
import checks
import models
from core.errors import EXIT_DOMAIN, EXIT_OK, EXIT_USAGE, BadParameterError, HankelToolkitError, exit_code_for
from core.hankel import hankel_spectrum
from core.parametric import parse_grid, sweep
from core.reduction import reduce
from core.tolerances import Tolerances
from core.widths import active_subspace, nwidth
from utils import report_generator as rg
from utils.run_config import RunConfig
from utils.system_io import load_corpus, load_parametric, load_system, save, system_to_dict, to_dict

logger = logging.getLogger('main')

# ======================================================================================
# --- ГЛАВНАЯ ПАНЕЛЬ УПРАВЛЕНИЯ ---
# ======================================================================================

# 1. ВОСПРОИЗВОДИМОСТЬ: один seed определяет все случайные пробы
DEFAULT_SEED = 42

# 2. ЧИСЛО СЛУЧАЙНЫХ ПОДПРОСТРАНСТВ для эмпирической проверки нижней границы
DEFAULT_DRAWS = 500

# 3. МЕТОД ПОНИЖЕНИЯ ПОРЯДКА по умолчанию: 'bt' или 'ohna'
DEFAULT_METHOD = 'ohna'

# 4. СЕТКА ПАРАМЕТРОВ по умолчанию для sweep (узлов на ось)
DEFAULT_GRID = '21'

# 5. КВАДРАТУРА ОПЕРАТОРА ГАНКЕЛЯ: число панелей и узлов Гаусса-Лежандра на панели
PANELS = 12
NODES = 8

# 6. ПУТИ К ПАПКАМ
DATA_DIR = 'data/systems'
REPORTS_DIR = 'reports'

# ======================================================================================
# --- КОНЕЦ ПАНЕЛИ УПРАВЛЕНИЯ ---
# ======================================================================================

EXIT_CHECKS_FAILED = 1

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_DATEFMT = '%d.%m.%Y %H:%M:%S'


def setup_logging(verbose=False, quiet=False, log_file=None):
    level = logging.DEBUG if verbose else logging.WARNING if quiet else logging.INFO
    formatter = logging.Formatter(LOG_FORMAT, datefmt=LOG_DATEFMT)
    root = logging.getLogger()
    for handler in list(root.handlers):
        root.removeHandler(handler)
        handler.close()

    stream = logging.StreamHandler(sys.stderr)
    stream.setFormatter(formatter)
    root.addHandler(stream)
    if log_file:
        file_handler = logging.FileHandler(log_file, encoding='utf-8')
        file_handler.setFormatter(formatter)
        root.addHandler(file_handler)
    root.setLevel(level)
    # warnings.warn(MultiplicityWarning) попадает в тот же журнал
    logging.captureWarnings(True)


def parse_model_params(pairs):
    """'k=v' -> {k: v}; значение разбирается как JSON, иначе остается строкой."""
    params = {}
    for pair in pairs or []:
        key, sep, value = pair.partition('=')
        if not sep or not key.strip():
            raise BadParameterError(f"Некорректный параметр модели: '{pair}'")
        try:
            params[key.strip()] = json.loads(value)
        except json.JSONDecodeError:
            params[key.strip()] = value
    return params


class CliParser(argparse.ArgumentParser):
    """argparse завершает работу кодом 2, который уже занят предметными ошибками."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser():
    common = CliParser(add_help=False)
    common.add_argument('--seed', type=int, default=DEFAULT_SEED, help="seed случайных проб")
    common.add_argument('--format', choices=['json', 'csv'], default=None, help="формат вывода")
    common.add_argument('--out', default=None, help="файл результата (по умолчанию stdout)")
    common.add_argument('--tol', action='append', default=[], metavar='NAME=VALUE',
                        help="переопределение допуска, например lyapunov=1e-9")
    common.add_argument('--report-dir', default=None,
                        help=f"папка для текстовых отчетов (например '{REPORTS_DIR}')")
    common.add_argument('--log-file', default=None, help="дополнительно писать журнал в файл")
    common.add_argument('-v', '--verbose', action='store_true', help="подробный журнал (DEBUG)")
    common.add_argument('-q', '--quiet', action='store_true', help="только предупреждения и ошибки")

    parser = CliParser(
        prog='main.py', description="Сингулярные числа Ганкеля, n-поперечники и понижение порядка LTI-систем")
    sub = parser.add_subparsers(dest='command', required=True)

    p = sub.add_parser('hsv', parents=[common], help="сингулярные числа Ганкеля")
    p.add_argument('--system', required=True)

    for name, helptext in (('nwidth', "n-поперечник образа единичного шара"),
                           ('active', "активное подпространство входов")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument('--system', required=True)
        p.add_argument('--order', type=int, required=True)
        p.add_argument('--draws', type=int, default=DEFAULT_DRAWS)
        p.add_argument('--radius', type=float, default=1.0)

    p = sub.add_parser('reduce', parents=[common], help="модель пониженного порядка")
    p.add_argument('--system', required=True)
    p.add_argument('--order', type=int, required=True)
    p.add_argument('--method', choices=['bt', 'ohna'], default=DEFAULT_METHOD)

    p = sub.add_parser('sweep', parents=[common], help="развертка sigma_i по сетке параметров")
    p.add_argument('--parametric', required=True)
    p.add_argument('--grid', default=DEFAULT_GRID)
    p.add_argument('--order', type=int, default=0)

    p = sub.add_parser('generate', parents=[common], help="тестовая система")
    p.add_argument('--model', required=True, choices=sorted(models.available_models))
    p.add_argument('--order', type=int, required=True)
    p.add_argument('--param', action='append', default=[], metavar='KEY=VALUE',
                   help=f"параметр генератора; результат обычно кладут в '{DATA_DIR}' через --out")

    p = sub.add_parser('verify', parents=[common], help="проверка всех инвариантов")
    group = p.add_mutually_exclusive_group()
    group.add_argument('--system', default=None)
    group.add_argument('--corpus', default=None)
    p.add_argument('--report', default=None, help="файл JSON-отчета (по умолчанию stdout)")
    p.add_argument('--draws', type=int, default=DEFAULT_DRAWS)
    return parser


def config_from_args(args):
    return RunConfig(
        command=args.command,
        system=getattr(args, 'system', None),
        parametric=getattr(args, 'parametric', None),
        corpus=getattr(args, 'corpus', None),
        out=getattr(args, 'report', None) or args.out,
        format=args.format or ('csv' if args.command == 'sweep' else 'json'),
        seed=args.seed,
        tolerances=Tolerances.from_pairs(args.tol),
        draws=getattr(args, 'draws', DEFAULT_DRAWS),
        order=getattr(args, 'order', None),
        grid=parse_grid(args.grid) if args.command == 'sweep' else None,
        method=getattr(args, 'method', DEFAULT_METHOD),
        radius=getattr(args, 'radius', 1.0),
        report_dir=args.report_dir,
    )


def emit(text, out=None):
    """Результат в файл out или в stdout; запись однопоточная."""
    if out:
        directory = os.path.dirname(out)
        if directory:
            os.makedirs(directory, exist_ok=True)
        with open(out, 'w', encoding='utf-8', newline='\n') as f:
            f.write(text)
        logger.info(f"Результат сохранен в: {out}")
    else:
        sys.stdout.write(text)


# --- Команды ---

def cmd_hsv(cfg):
    system = load_system(cfg.system)
    spec = hankel_spectrum(system, cfg.tolerances)
    if cfg.format == 'csv':
        emit(rg.to_csv(rg.hsv_table(spec)), cfg.out)
    else:
        emit(rg.to_json({'system': system.name, 'sigma': spec.sigma}), cfg.out)
    if cfg.report_dir:
        rows = [("Порядок N", spec.order), ("Ранг", spec.rank)]
        rows += [(f"sigma_{i + 1}", float(s)) for i, s in enumerate(spec.sigma)]
        rg.generate_text_report('hsv', system.name, cfg.seed, "СИНГУЛЯРНЫЕ ЧИСЛА ГАНКЕЛЯ", rows, cfg.report_dir)
    return EXIT_OK


def _width_command(cfg, operation, title):
    system = load_system(cfg.system)
    spec = hankel_spectrum(system, cfg.tolerances)
    report = operation(spec, cfg.order, draws=cfg.draws, seed=cfg.seed, radius=cfg.radius,
                       tol=cfg.tolerances)
    if cfg.format == 'csv':
        emit(rg.to_csv(rg.record_table(report)), cfg.out)
    else:
        emit(rg.to_json(dict(report.as_dict(), system=system.name)), cfg.out)
    if cfg.report_dir:
        rows = [
            ("Размерность n", report.n),
            ("Ошибка подпространства", report.error),
            (f"sigma_{report.n + 1}", report.reference),
            ("Разность", report.gap),
            ("Случайных проб", report.draws),
            ("Минимум по пробам", report.empirical_infimum),
            ("Нижняя граница подтверждена", report.certified),
        ]
        rg.generate_text_report(cfg.command, system.name, cfg.seed, title, rows, cfg.report_dir)
    return EXIT_OK if report.certified else EXIT_CHECKS_FAILED


def cmd_nwidth(cfg):
    return _width_command(cfg, nwidth, "N-ПОПЕРЕЧНИК ОБРАЗА ЕДИНИЧНОГО ШАРА")


def cmd_active(cfg):
    return _width_command(cfg, active_subspace, "АКТИВНОЕ ПОДПРОСТРАНСТВО ВХОДОВ")


def cmd_reduce(cfg):
    system = load_system(cfg.system)
    red = reduce(system, cfg.order, cfg.method, cfg.tolerances)
    spec = hankel_spectrum(system, cfg.tolerances)
    report = {
        'system': system.name,
        'method': red.method,
        'requested_order': red.requested_order,
        'order': red.order,
        'hankel_error': red.hankel_error,
        'sigma_next': spec.sigma_at(cfg.order + 1),
    }
    if cfg.out:
        save(red.system, cfg.out)
        emit(rg.to_json(report))
    else:
        emit(rg.to_json({'model': system_to_dict(red.system), 'report': report}))
    if cfg.report_dir:
        rows = [
            ("Метод", red.method),
            ("Запрошенный порядок", red.requested_order),
            ("Порядок модели", red.order),
            ("Ошибка по норме Ганкеля", red.hankel_error),
            (f"sigma_{cfg.order + 1}", report['sigma_next']),
        ]
        rg.generate_text_report('reduce', system.name, cfg.seed, "ПОНИЖЕНИЕ ПОРЯДКА", rows, cfg.report_dir)
    return EXIT_OK


def cmd_sweep(cfg):
    psys = load_parametric(cfg.parametric)
    res = sweep(psys, counts=cfg.grid, tol=cfg.tolerances)
    n = cfg.order or 0
    bound = res.lower_bound(n)
    if cfg.format == 'csv':
        emit(rg.to_csv(rg.sweep_table(res)) + rg.lower_bound_line(res, n), cfg.out)
    else:
        emit(rg.to_json({
            'system': psys.name,
            'parameters': list(psys.parameter_names),
            'points': res.included,
            'sigma': res.sigma_table[res.stable],
            'excluded': res.excluded,
            'order': n,
            'lower_bound': bound,
            'argmax': res.argmax(n),
        }), cfg.out)
    if cfg.report_dir:
        rows = [
            ("Параметры", ", ".join(psys.parameter_names)),
            ("Точек сетки", len(res.points)),
            ("Исключено неустойчивых", len(res.excluded)),
            (f"max_p sigma_{n + 1}(p)", bound),
            ("Достигается в точке", ", ".join(f"{v:.6g}" for v in res.argmax(n))),
        ]
        rg.generate_text_report('sweep', psys.name, cfg.seed, "РАЗВЕРТКА ПО ПАРАМЕТРАМ", rows, cfg.report_dir)
    return EXIT_OK


def cmd_generate(cfg, params):
    model = models.generate(cfg.model, cfg.order, seed=cfg.seed, **params)
    if cfg.out:
        save(model, cfg.out)
    else:
        emit(rg.to_json(to_dict(model)))
    return EXIT_OK


def cmd_verify(cfg):
    if cfg.system:
        items = [load_system(cfg.system)]
    elif cfg.corpus:
        items = load_corpus(cfg.corpus)
    else:
        items = checks.default_corpus(cfg.seed) + checks.default_families()
        logger.info(f"Проверка на встроенном корпусе из {len(items)} систем (seed={cfg.seed})")

    report = checks.run_verification(items, cfg.tolerances, seed=cfg.seed, draws=cfg.draws,
                                    hankel={'panels': PANELS, 'nodes_per_panel': NODES})
    emit(rg.to_json(report), cfg.out)
    # неустойчивая система - ошибка входа, а не проваленная проверка
    rejected = [s['name'] for s in report['systems'] if checks.rejected_input(s)]
    if rejected:
        logger.error(f"Неустойчивые системы на входе: {', '.join(rejected)}")
        return EXIT_DOMAIN
    failed = [f"{s['name']}:{c['check']}" for s in report['systems'] for c in s['checks'] if not c['passed']]
    if failed:
        logger.error(f"Не пройдено проверок: {len(failed)} ({', '.join(failed)})")
        return EXIT_CHECKS_FAILED
    logger.info(f"Все проверки пройдены ({len(items)} систем)")
    return EXIT_OK


COMMANDS = {
    'hsv': cmd_hsv,
    'nwidth': cmd_nwidth,
    'active': cmd_active,
    'reduce': cmd_reduce,
    'sweep': cmd_sweep,
    'verify': cmd_verify,
}


def main(argv=None):
    args = build_parser().parse_args(argv)
    setup_logging(args.verbose, args.quiet, args.log_file)
    try:
        cfg = config_from_args(args)
        if args.command == 'generate':
            return cmd_generate(args, parse_model_params(args.param))
        return COMMANDS[args.command](cfg)
    except (HankelToolkitError, OSError, json.JSONDecodeError) as e:
        code = exit_code_for(e)
        logger.error(f"{type(e).__name__}: {e}")
        return code


if __name__ == '__main__':
    sys.exit(main())
