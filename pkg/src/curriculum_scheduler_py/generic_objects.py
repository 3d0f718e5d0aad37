# =============================================================================
# RL Curriculum Scheduler - Generic Objects
# =============================================================================
'''
RL Curriculum Scheduler - Generic Objects
-
Contains the generic objects that are implemented by the objects in the rest of
this package.
'''
# =============================================================================

# =============================================================================
# Imports
# =============================================================================

# used for custom errors
from .errors import (
    AbstractError, # abstract method error
    FileTypeError, # file type error
)

# used for creating enumerators
from enum import (
    Enum, # regular enumerator
    EnumMeta,
    IntEnum, # enumerator for integers
)

# used for displaying arrays
import numpy as np

# used for identifying file extensions
from pathlib import Path

# used for type-hinting
from typing import (
    Any, # any type
    List, # used for type-hinting lists
    Union, # multiple types
)


# =============================================================================
# Object to String Converter
# =============================================================================
def to_str(obj: Any, lvl: 'VerbosityLevel') -> str:
    '''
    Object to String Converter
    -
    Converts a single object to a single or multiple line string. Used by the
    `OBJ().__repr__`, `OBJ.__str__` and `OBJ.Debug` methods.

    Parameters
    -
    - obj : `Any`
        - Object being converted to a string.
    - lvl : `VerbosityLevel`
        - Verbosity level with which to output the data.

    Returns
    -
    - `str`
        - String representation of the given object.
    '''

    # initialize variables
    output: str = '' # string being produced

    # identify datatype
    if obj is None or isinstance(obj, (bool, int, complex)):
        output = str(obj)
    elif isinstance(obj, float): # floats are shortened for readability
        output = f'{obj:.6g}' if lvl == VerbosityLevel.SHORT else repr(obj)
    elif isinstance(obj, type): # object type
        output = obj.__name__
    elif isinstance(obj, str): # string
        output = f'"{obj}"'
    elif isinstance(obj, np.ndarray): # numpy array
        if lvl == VerbosityLevel.SHORT:
            output = f'ndarray(shape={obj.shape}, dtype={obj.dtype})'
        elif lvl == VerbosityLevel.LONG:
            output = np.array2string(
                obj,
                precision = 4,
                threshold = 20,
                edgeitems = 3,
            )
        else:
            output = np.array2string(obj, precision = 8, threshold = 200)
    elif isinstance(obj, dict): # dictionary
        if lvl == VerbosityLevel.SHORT:
            output = '{' + ', '.join(
                f'{key}: {to_str(val, lvl)}' for key, val in obj.items()
            ) + '}'
        else:
            output = (
                'dict(\n\t\t' \
                + ',\n\t\t'.join(
                    f'{key}: ' \
                    + to_str(
                        val,
                        VerbosityLevel(max(lvl - 1, 0))
                    ).replace('\n', '\n\t')
                    for key, val in obj.items()
                ) \
                + '\n\t)'
            )
    elif isinstance(obj, (list, tuple, set, frozenset)): # sequences
        items = list(obj)
        if lvl == VerbosityLevel.SHORT:
            output = '[' + ', '.join(to_str(x, lvl) for x in items[:8])
            if len(items) > 8: output += f', ... + {len(items) - 8} items'
            output += ']'
        else:
            shown = items if lvl == VerbosityLevel.ALL else items[:20]
            output = (
                f'{obj.__class__.__name__}(\n\t\t' \
                + ',\n\t\t'.join(
                    f'#{i}: ' \
                    + to_str(x, VerbosityLevel.SHORT).replace('\n', '\n\t')
                    for i, x in enumerate(shown)
                )
            )
            if len(items) > len(shown):
                output += f',\n\t\t... + {len(items) - len(shown)} items'
            output += '\n\t)'
    elif isinstance(obj, OBJ): # custom object
        output = str(obj) if lvl == VerbosityLevel.SHORT else repr(obj)
    elif isinstance(obj, Enum): # enumeration object
        output = str(obj) if lvl == VerbosityLevel.SHORT else repr(obj)
    elif callable(obj): # function
        output = getattr(obj, '__name__', repr(obj))
    else: # unknown object type
        output = f'Unknown Object Type: {obj!r}'

    # single-line output additional editing
    if lvl == VerbosityLevel.SHORT:
        # prevent multiple lines
        output = output.replace('\n', '\\n')

        # cap length at 100 characters
        if len(output) > 100:
            output = f'{output[:97]}... + {len(output) - 97}'

    return output


# =============================================================================
# Generic Enum
# =============================================================================
class EnumParentMeta(EnumMeta):
    '''
    Generic Enum Meta
    -
    Contains additional functionality that other `Enum` classes require.
    '''

    # ===============
    # Contains (`in`)
    def __contains__(cls, item: object) -> bool:
        try: cls(item)
        except ValueError: return False
        return True
class EnumParent(Enum, metaclass=EnumParentMeta):
    '''
    Generic Enum
    -
    Parent of every string-valued enum in the package. Supports `value in
    Enum` checks, and lists its values for error messages.
    '''

    # =====================
    # Method - Valid Values
    @classmethod
    def Values(cls) -> List[str]:
        ''' All of the valid (string) values of the enum. '''
        return [member.value for member in cls]


# =============================================================================
# File Types Enum
# =============================================================================
class FileType(EnumParent):
    '''
    File Types Enum
    -
    Collection of all valid file types that experiment specs can be read
    from.
    '''

    JSON = 'json'
    ''' JSON Format (.json). '''

    XML = 'xml'
    ''' XML Format (.xml). '''

    YAML = 'yaml'
    ''' YAML Format (.yaml / .yml). '''

    # ===========================
    # Method - File Type from Path
    @classmethod
    def FromPath(cls, file_name: Union[str, Path]) -> 'FileType':
        '''
        File Type from Path
        -
        Identifies the file type of a file from its extension.

        Parameters
        -
        - file_name : `str | Path`
            - Name + Directory of the file.

        Returns
        -
        - `FileType`
            - File type matching the extension.
        '''

        # get the extension (".yml" is an alias of ".yaml")
        ext = Path(file_name).suffix.lstrip('.').lower()
        if ext == 'yml': ext = 'yaml'

        # match it to a supported file type
        if ext not in cls:
            raise FileTypeError(
                f'`{file_name}` does not have a valid extension supported ' \
                + f'by {cls.__name__} (expected one of {cls.Values()!r})'
            )
        return cls(ext)


# =============================================================================
# Base Object Definition
# =============================================================================
class OBJ(object):
    '''
    Base Object Definition
    -
    Base object definition for all other objects in the package. Contains
    basic methods used for debugging purposes.

    Fields
    -
    None

    Methods
    -
    - __repr__() : `str`
    - __str__() : `str`
    - Debug(indent : `int` = 0) : `str`
    - Duplicate() : `OBJ` << abstract >>
    - GetData(lvl : `VerbosityLevel`) : `List<str>` << abstract >>
    '''

    # ====================================
    # Method - Render Labelled Data Points
    def _DataStrings(self, lvl: 'VerbosityLevel', pad: str) -> List[str]:
        '''
        Render Labelled Data Points
        -
        Renders each of the data points named by `GetData(lvl)` as a
        `label = value` string.

        Parameters
        -
        - lvl : `VerbosityLevel`
            - Verbosity level of the data points.
        - pad : `str`
            - Indentation added after each newline in a value.

        Returns
        -
        - `List<str>`
            - One string per data point.
        '''

        # initialize data
        data_strings: List[str] = [] # collection of labels + values
        label: str # data label

        # construct data strings for each data point
        for label in self.GetData(lvl):
            try:
                value = to_str(getattr(self, label), lvl)
                if pad: value = value.replace('\n', f'\n{pad}')
                data_strings.append(f'{label} = {value}')
            except Exception as e:
                data_strings.append(f'{label} = {e}')
        return data_strings

    # ==============================================
    # Method - Official String Representation Method
    def __repr__(self) -> str:
        '''
        Official String Representation
        -
        Called by the `repr` built-in function, this computes the "official"
        string representation of the current object.

        Parameters
        -
        None

        Returns
        -
        - `str`
            - Official string representation of the current object.
        '''

        return (
            f'<{self.__class__.__name__}\n\t' \
            + ',\n\t'.join(self._DataStrings(VerbosityLevel.LONG, '\t')) \
            + f'\n/{self.__class__.__name__}>'
        )

    # ==============================================
    # Method - Informal String Representation Method
    def __str__(self) -> str:
        '''
        Informal String Representation
        -
        Called by the `str`, `__format__`, and `print` built-in functions,
        this computes the "informal" or nicely printable string
        representation of the current object.

        Parameters
        -
        None

        Returns
        -
        - `str`
            - Informal string representation of the current object.
        '''

        return (
            f'<{self.__class__.__name__} :: ' \
            + ', '.join(self._DataStrings(VerbosityLevel.SHORT, '')) \
            + ' />'
        )

    # =====================
    # Method - Debug Object
    def Debug(self, indent: int = 0) -> str:
        '''
        Debug Object
        -
        Creates a multi-line string representation of the current object
        instance, including all attribute / property values (using the
        `VerbosityLevel.ALL` level).

        Parameters
        -
        - indent : `int`
            - Specifies the amount of additional indentation to use in the
                string. Defaults to `0`.

        Returns
        -
        - `str`
            - Multi-line debug string representation of the current object.
        '''

        t: str = '\t' * indent # additional indentation
        return (
            f'{t}<{self.__class__.__name__}\n\t{t}' \
            + f',\n\t{t}'.join(
                self._DataStrings(VerbosityLevel.ALL, f'\t{t}')
            ) \
            + f'\n{t}/{self.__class__.__name__}>'
        )

    # =========================
    # Method - Duplicate Object
    def Duplicate(self) -> 'OBJ':
        '''
        Duplicate Object
        -
        Creates a duplicate of the current object, however with entirely new
        references to all attribute and property values (arrays included),
        meaning that the duplicate created is entirely independent from the
        original.

        Parameters
        -
        None

        Returns
        -
        - `OBJ`
            - Duplicate of the current object.
        '''

        # this method should be overridden in subclasses
        raise AbstractError(
            f'OBJ().Duplicate() has not been defined in {self.__class__}'
        )

    # =================
    # Method - Get Data
    def GetData(self, lvl: 'VerbosityLevel') -> List[str]:
        '''
        Get Data
        -
        Returns a list of attribute / property names that the object should
        display, which can be used by debugging functions to produce a pretty
        output of the current object instance.

        Parameters
        -
        - lvl : `VerbosityLevel`
            - The level of verbosity.

        Returns
        -
        - `List<str>`
            - A collection of the names of all attributes and properties that
                should be retrieved from the current object instance.
        '''

        # This method should be overridden in subclasses
        raise AbstractError(
            f'OBJ().GetData(lvl = {lvl}) has not been defined in ' \
            + f'{self.__class__}'
        )


# =============================================================================
# Verbosity Levels Enum
# =============================================================================
class VerbosityLevel(IntEnum):
    '''
    Verbosity Levels Enum
    -
    Contains the different verbosity levels that can be used to get
    data from the current object for debugging and/or logging
    purposes.
    '''

    SHORT = 0
    ''' Shortest verbosity level, get only a couple of data points. Used
        for single-line string representations of the current object. '''
    LONG = 1
    ''' Long verbosity level, get most data points. Used for multi-line
        string representations of the current object. '''
    ALL = 2
    ''' Very detailed verbosity level, get all data points. Used for
        debug strings that include all of the instance data in the object in
        a very long multi-line string. '''


# =============================================================================
# End of File
# =============================================================================
