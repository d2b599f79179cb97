#!/usr/bin/env node
/**
 * plotgen <utilization|discovery|drops|all> --in DIR --out DIR
 *
 * Renders SVG figures from a directory of simulator CSV exports.  Exits
 * nonzero with the offending file or column named when an input is
 * missing or malformed.
 */
import { parseArgs } from 'node:util';

import { CsvError } from './csv';
import { FAMILIES, Family, renderFamilies } from './render';

const USAGE =
  'usage: plotgen <utilization|discovery|drops|all> --in DIR --out DIR';

export function main(argv: string[]): number {
  let parsed;
  try {
    parsed = parseArgs({
      args: argv,
      allowPositionals: true,
      options: {
        in: { type: 'string' },
        out: { type: 'string', default: 'figures' },
      },
    });
  } catch (error) {
    console.error(`plotgen: ${(error as Error).message}`);
    console.error(USAGE);
    return 1;
  }
  const kind = parsed.positionals[0];
  const inDir = parsed.values.in;
  const outDir = parsed.values.out as string;
  const kinds: string[] = [...FAMILIES, 'all'];
  if (kind === undefined || !kinds.includes(kind) || inDir === undefined) {
    console.error(USAGE);
    return 1;
  }
  try {
    const written = renderFamilies(kind as Family | 'all', inDir, outDir);
    for (const outPath of written) {
      console.log(`wrote ${outPath}`);
    }
    if (written.length === 0) {
      console.error('plotgen: no figures to render');
      return 1;
    }
  } catch (error) {
    if (error instanceof CsvError) {
      console.error(`plotgen: ${error.message}`);
      return 1;
    }
    throw error;
  }
  return 0;
}

if (require.main === module) {
  process.exit(main(process.argv.slice(2)));
}
