/**
 * Command line:
 *
 *   node dist/cli.js plot-convergence IN.csv OUT.svg
 *   node dist/cli.js plot-benchmark   IN.csv OUT.svg
 *
 * Exit codes: 0 success, 1 on missing columns, too few usable points, or
 * I/O failures (message on stderr).  Figures are static SVG documents.
 */

import { readFileSync, writeFileSync } from 'fs';

import { renderBenchmark } from './benchmark';
import { parseCompareCsv, parseConvergenceCsv } from './csv';
import { renderConvergence } from './convergence';

export function main(argv: string[]): number {
  const [command, input, output] = argv;
  if (!command || !input || !output) {
    process.stderr.write(
      'usage: cli.js plot-convergence|plot-benchmark IN.csv OUT.svg\n',
    );
    return 1;
  }
  try {
    const text = readFileSync(input, 'utf8');
    if (command === 'plot-convergence') {
      const figure = renderConvergence(parseConvergenceCsv(text));
      writeFileSync(output, figure.svg);
      process.stdout.write(
        `wrote ${output} (slope ${figure.slope.toPrecision(12)} over ${figure.usedCount} points)\n`,
      );
      return 0;
    }
    if (command === 'plot-benchmark') {
      const figure = renderBenchmark(parseCompareCsv(text));
      writeFileSync(output, figure.svg);
      process.stdout.write(`wrote ${output}\n`);
      return 0;
    }
    process.stderr.write(`unknown command '${command}'\n`);
    return 1;
  } catch (err) {
    process.stderr.write(`${err instanceof Error ? `${err.name}: ${err.message}` : err}\n`);
    return 1;
  }
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
