/** Server-side SVG rendering and the render-everything entry point. */
import * as fs from 'node:fs';
import * as path from 'node:path';

import * as echarts from 'echarts';

import { readDiscovery, readDrops, readUtilization } from './csv';
import {
  Figure,
  discoveryFigures,
  dropsFigures,
  utilizationFigures,
} from './figures';

export const FAMILIES = ['utilization', 'discovery', 'drops'] as const;
export type Family = (typeof FAMILIES)[number];

export function renderSvg(
  figure: Figure,
  width = 840,
  height = 480,
): string {
  const chart = echarts.init(null, null, {
    renderer: 'svg',
    ssr: true,
    width,
    height,
  });
  try {
    chart.setOption(figure.option);
    return chart.renderToSVGString();
  } finally {
    chart.dispose();
  }
}

export function buildFamily(family: Family, inDir: string): Figure[] {
  switch (family) {
    case 'utilization':
      return utilizationFigures(
        readUtilization(path.join(inDir, 'utilization.csv')));
    case 'discovery':
      return discoveryFigures(readDiscovery(path.join(inDir, 'discovery.csv')));
    case 'drops':
      return dropsFigures(readDrops(path.join(inDir, 'drops.csv')));
  }
}

/** Render one family (or all three) from a CSV directory into SVG files;
 * returns the paths written. */
export function renderFamilies(
  kind: Family | 'all',
  inDir: string,
  outDir: string,
): string[] {
  const families: readonly Family[] = kind === 'all' ? FAMILIES : [kind];
  const written: string[] = [];
  fs.mkdirSync(outDir, { recursive: true });
  for (const family of families) {
    for (const figure of buildFamily(family, inDir)) {
      const outPath = path.join(outDir, `${figure.name}.svg`);
      fs.writeFileSync(outPath, renderSvg(figure));
      written.push(outPath);
    }
  }
  return written;
}
