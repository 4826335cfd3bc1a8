import os
import time
import logging

import yaml
import numpy as np
import tables as tb

import eulerkronecker


class ScanBase(object):
    """
    Basic run meta class
    """
    scan_id = 'scan'

    def __init__(self, filename=None, output_dir='output_data', record=True):
        self.record = record
        self.logger = logging.getLogger(self.__class__.__name__)
        self.h5_file = None
        self.output_filename = None
        if not record:
            return

        if filename is None:
            self.working_dir = os.path.join(os.getcwd(), output_dir)
            self.run_name = time.strftime("%Y%m%d_%H%M%S_") + self.scan_id
        else:
            filename = os.path.realpath(filename)
            if filename.endswith('.h5'):
                filename = filename[:-3]
            self.working_dir = os.path.dirname(filename)
            self.run_name = os.path.basename(filename)
        if not os.path.exists(self.working_dir):
            os.makedirs(self.working_dir)
        self.output_filename = os.path.join(self.working_dir, self.run_name)

        root = logging.getLogger()
        fh = None
        for handler in root.handlers:
            if isinstance(handler, logging.FileHandler):
                fh = handler
        if fh is None:
            fh = logging.FileHandler(self.output_filename + '.log')
            fh.setFormatter(logging.Formatter("%(asctime)s [%(levelname)-5.5s] %(message)s"))
            fh.setLevel(logging.INFO)
            root.addHandler(fh)
        self.logger.info("Initializing {:s}".format(self.__class__.__name__))

    def scan(self, **kwargs):
        ''' Run the computation and return the results as a structured array. '''
        raise NotImplementedError

    def start(self, **kwargs):
        start_time = time.time()
        results = self.scan(**kwargs)
        self.logger.info('{:s} finished {:d} rows in {:.1f} s'.format(self.scan_id, len(results),
                                                                         time.time() - start_time))
        if self.record:
            self._write_results(results, kwargs)
        return results

    def _write_results(self, results, kwargs):
        self.h5_file = tb.open_file(self.output_filename + '.h5', mode="w", title=self.scan_id)
        try:
            table = self.h5_file.create_table(
                self.h5_file.root,
                name='results',
                obj=np.asarray(results),
                title='results',
                filters=tb.Filters(complib='zlib', complevel=5, fletcher32=False))
            table.attrs.scan_id = self.scan_id
            table.attrs.kwargs = yaml.dump({k: v for k, v in kwargs.items() if _plain(v)})
            table.attrs.version = eulerkronecker.__version__
            self.kwargs = self.h5_file.create_vlarray(
                self.h5_file.root,
                name='kwargs',
                atom=tb.VLStringAtom(),
                title='kwargs',
                filters=tb.Filters(complib='zlib', complevel=5, fletcher32=False))
            self.kwargs.append(b"kwargs")
            self.kwargs.append(table.attrs.kwargs.encode())
        finally:
            self.h5_file.close()
        self.logger.info('Results written to {:s}.h5'.format(self.output_filename))


def _plain(value):
    return value is None or isinstance(value, (bool, int, float, str, list, tuple, dict))
